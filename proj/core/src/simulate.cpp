#include "gibbsfit/simulate.hpp"

#include <cmath>

#include "gibbsfit/errors.hpp"
#include "gibbsfit/rng.hpp"

namespace gibbsfit {

namespace {
std::size_t draw_index(CounterRng& rng, const Eigen::VectorXd& probs) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<std::size_t>(i);
  }
  return static_cast<std::size_t>(probs.size() - 1);
}
}  // namespace

Trajectory sample_trajectory(const GibbsModel& model, std::size_t n, std::uint64_t seed) {
  const Sft& sft = model.sft();
  const auto bl = static_cast<std::size_t>(sft.block_len());
  if (n < bl) throw DomainError("trajectory length must be at least block_len");

  CounterRng rng = CounterRng(seed).derive("trajectory");
  const MarkovMeasure& mu = model.measure();

  Trajectory out;
  out.seed = seed;
  out.source = "gibbs";
  out.symbols.reserve(n);

  std::size_t u = draw_index(rng, mu.stationary());
  const WordView first = sft.block(u);
  out.symbols.assign(first.begin(), first.end());

  Eigen::VectorXd row(mu.kernel().cols());
  while (out.symbols.size() < n) {
    row = mu.kernel().row(static_cast<Eigen::Index>(u));
    const std::size_t v = draw_index(rng, row);
    out.symbols.push_back(sft.block(v).back());
    u = v;
  }
  return out;
}

EmissionSequence emit(const Trajectory& hidden, const LossSpec& spec, std::size_t theta_idx,
                      std::uint64_t seed, double theta_value) {
  if (spec.kind() != LossKind::neg_log_density) {
    throw KindMismatch("emit requires a neg_log_density loss");
  }
  CounterRng rng = CounterRng(seed).derive("emission");
  EmissionSequence out;
  out.seed = seed;
  out.theta_star = theta_value;
  out.source = "hidden_gibbs";
  out.values.reserve(hidden.symbols.size());
  for (Symbol x : hidden.symbols) {
    const double m = spec.gaussian_mean(theta_idx, x);
    const double s = spec.gaussian_std(theta_idx, x);
    out.values.push_back(m + s * rng.normal());
  }
  out.hidden = hidden;
  return out;
}

std::variant<Trajectory, EmissionSequence> misspecified_source(const std::string& name,
                                                               std::size_t n, std::uint64_t seed,
                                                               const MisspecifiedParams& params) {
  if (name == "logistic_binarized") {
    CounterRng rng = CounterRng(seed).derive("logistic");
    Trajectory out;
    out.seed = seed;
    out.source = name;
    out.symbols.reserve(n);
    double x = 0.05 + 0.9 * rng.uniform();
    for (std::size_t k = 0; k < n; ++k) {
      out.symbols.push_back(x > 0.5 ? Symbol{1} : Symbol{0});
      x = params.logistic_a * x * (1.0 - x);
    }
    return out;
  }
  if (name == "periodic_noise") {
    if (params.period < 1) throw DomainError("periodic_noise needs period >= 1");
    std::vector<double> pattern = params.pattern;
    if (pattern.empty()) {
      for (int j = 0; j < params.period; ++j) pattern.push_back(static_cast<double>(j));
    }
    CounterRng rng = CounterRng(seed).derive("periodic");
    EmissionSequence out;
    out.seed = seed;
    out.source = name;
    out.values.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      out.values.push_back(pattern[k % pattern.size()] + params.jitter * rng.normal());
    }
    return out;
  }
  throw UnknownGenerator("no observation generator named '" + name + "'");
}

}  // namespace gibbsfit
