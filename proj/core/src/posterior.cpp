#include "gibbsfit/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gibbsfit/errors.hpp"
#include "gibbsfit/parallel.hpp"
#include "gibbsfit/rng.hpp"
#include "gibbsfit/simulate.hpp"
#include "gibbsfit/thermo.hpp"

namespace gibbsfit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

double logsumexp(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf || !std::isfinite(m)) return m;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc);
}

}  // namespace

double PosteriorGrid::mass_of(std::span<const std::size_t> indices) const {
  double acc = 0.0;
  for (std::size_t i : indices) acc += masses[i];
  return acc;
}

double PosteriorGrid::log_mass_of(std::span<const std::size_t> indices) const {
  std::vector<double> parts;
  parts.reserve(indices.size());
  for (std::size_t i : indices) parts.push_back(log_posterior[i]);
  return logsumexp(parts);
}

std::size_t PosteriorGrid::mode() const {
  return static_cast<std::size_t>(
      std::max_element(log_posterior.begin(), log_posterior.end()) - log_posterior.begin());
}

PosteriorGrid assemble_posterior(const ThetaGrid& grid, std::size_t n,
                                 std::vector<double> log_weights) {
  if (log_weights.size() != grid.size()) throw ShapeMismatch("one log weight per grid point");
  PosteriorGrid pg;
  pg.theta = grid.points();
  pg.prior = grid.prior_weights();
  pg.n = n;
  pg.log_weights = std::move(log_weights);

  double wmax = kNegInf;
  for (double w : pg.log_weights) {
    if (std::isnan(w)) throw NonFinite("log weight is NaN");
    wmax = std::max(wmax, w);
  }
  if (wmax == kNegInf) {
    throw InadmissibleObservation("every grid point has zero posterior weight");
  }

  // masses via max-subtracted softmax against prior probabilities: when all
  // weights coincide, exp(0) = 1 and the masses are exactly the prior
  double total = 0.0;
  pg.masses.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    pg.masses[i] = grid.prior(i) * std::exp(pg.log_weights[i] - wmax);
    total += pg.masses[i];
  }
  for (double& m : pg.masses) m /= total;
  pg.log_Z = wmax + std::log(total);

  pg.log_posterior.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    pg.log_posterior[i] = std::log(grid.prior(i)) + pg.log_weights[i] - pg.log_Z;
  }
  return pg;
}

std::vector<double> log_partition_prefixes(const GibbsModel& model, const LossSpec& spec,
                                           std::size_t theta_idx, std::span<const Observation> ys,
                                           std::span<const std::size_t> lengths, double beta) {
  const MarkovMeasure& mu = model.measure();
  const Sft& sft = model.sft();
  const auto b = static_cast<std::size_t>(sft.block_count());

  std::vector<std::size_t> sorted(lengths.begin(), lengths.end());
  std::sort(sorted.begin(), sorted.end());
  if (!sorted.empty() && sorted.front() < 1) throw DomainError("prefix lengths must be >= 1");
  if (!sorted.empty() && sorted.back() > ys.size()) {
    throw LengthMismatch("prefix length exceeds the observation sequence");
  }
  // beta = 0 integrates exp(0) against a probability measure
  if (beta == 0.0) return std::vector<double>(lengths.size(), 0.0);

  // leading symbol of each block, through which the window-1 loss reads x
  std::vector<Symbol> lead(b);
  for (std::size_t u = 0; u < b; ++u) lead[u] = sft.block(u).front();

  std::vector<double> alpha(b, 0.0), next(b, 0.0), losses(b, 0.0), parts(b, 0.0);
  double correction = 0.0;   // accumulated per-step baselines
  bool stationary = true;    // alpha still equals log pi exactly
  bool dead = false;         // all paths annihilated by infinite losses

  std::vector<double> out(lengths.size(), kNegInf);
  auto record = [&](std::size_t n_steps) {
    for (std::size_t j = 0; j < lengths.size(); ++j) {
      if (lengths[j] != n_steps) continue;
      if (dead) {
        out[j] = kNegInf;
      } else if (stationary) {
        out[j] = -correction;
      } else {
        for (std::size_t u = 0; u < b; ++u) parts[u] = alpha[u];
        out[j] = logsumexp(parts) - correction;
      }
    }
  };

  const std::size_t n_max = sorted.empty() ? 0 : sorted.back();
  for (std::size_t k = 0; k < n_max; ++k) {
    if (!dead) {
      double base = kInf;
      for (std::size_t u = 0; u < b; ++u) {
        const double l = beta * spec.eval(theta_idx, lead[u], ys[k]);
        if (std::isnan(l)) throw NonFinite("loss evaluated to NaN at step " + std::to_string(k));
        losses[u] = l;
        base = std::min(base, l);
      }
      if (base == kInf) {
        dead = true;
      } else {
        correction += base;
        bool all_zero = true;
        for (std::size_t u = 0; u < b; ++u) {
          losses[u] -= base;
          if (losses[u] != 0.0) all_zero = false;
        }
        if (stationary && all_zero) {
          // zero residual keeps the forward state at the stationary vector
        } else if (stationary) {
          for (std::size_t u = 0; u < b; ++u) alpha[u] = mu.log_stationary(u) - losses[u];
          stationary = false;
        } else {
          for (std::size_t v = 0; v < b; ++v) {
            double m = kNegInf;
            for (std::size_t u = 0; u < b; ++u) {
              parts[u] = alpha[u] + mu.log_kernel(u, v);
              m = std::max(m, parts[u]);
            }
            if (m == kNegInf) {
              next[v] = kNegInf;
              continue;
            }
            double acc = 0.0;
            for (std::size_t u = 0; u < b; ++u) acc += std::exp(parts[u] - m);
            next[v] = m + std::log(acc) - losses[v];
          }
          alpha.swap(next);
          if (std::all_of(alpha.begin(), alpha.end(), [](double a) { return a == kNegInf; })) {
            dead = true;
          }
        }
      }
    }
    record(k + 1);
  }
  return out;
}

double log_partition_theta(const GibbsModel& model, const LossSpec& spec, std::size_t theta_idx,
                           std::span<const Observation> ys, double beta) {
  const std::size_t n = ys.size();
  const std::size_t lens[] = {n};
  return log_partition_prefixes(model, spec, theta_idx, ys, lens, beta)[0];
}

PosteriorGrid gibbs_posterior(const PotentialFamily& family, const LossSpec& spec,
                              std::span<const Observation> ys, double beta, int threads) {
  if (spec.kind() != LossKind::discrete && spec.grid_size() != family.size()) {
    throw ShapeMismatch("loss observation map does not cover the family grid");
  }
  std::vector<double> weights(family.size());
  parallel_for(family.size(), threads, [&](std::size_t i) {
    weights[i] = log_partition_theta(family.model(i), spec, i, ys, beta);
  });
  return assemble_posterior(family.grid(), ys.size(), std::move(weights));
}

PosteriorGrid bayes_posterior_hidden(const PotentialFamily& family, const LossSpec& spec,
                                     std::span<const double> emissions, int threads) {
  if (spec.kind() != LossKind::neg_log_density) {
    throw KindMismatch("hidden Bayes posterior requires the density loss kind");
  }
  const std::vector<Observation> ys = to_observations(emissions);
  return gibbs_posterior(family, spec, ys, 1.0, threads);
}

double DirectLoss::eval(std::size_t theta_idx, WordView window) const {
  return family_->model(theta_idx).pressure() - family_->potential(theta_idx).value(window);
}

double DirectLoss::path_sum(std::size_t theta_idx, std::span<const Symbol> y,
                            std::size_t n) const {
  const auto r = static_cast<std::size_t>(window());
  if (n < 1) throw DomainError("path_sum needs n >= 1");
  if (y.size() < n + r - 1) {
    throw LengthMismatch("direct loss over n = " + std::to_string(n) + " windows needs " +
                         std::to_string(n + r - 1) + " observed symbols");
  }
  const double pressure = family_->model(theta_idx).pressure();
  const Potential& f = family_->potential(theta_idx);
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += pressure - f.value(y.subspan(k, r));
  return acc;
}

PosteriorGrid gibbs_posterior_direct(const PotentialFamily& family, std::span<const Symbol> y,
                                     std::size_t n, double beta) {
  DirectLoss loss(family);
  std::vector<double> weights(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    weights[i] = -beta * loss.path_sum(i, y, n);
  }
  return assemble_posterior(family.grid(), n, std::move(weights));
}

PosteriorGrid bayes_posterior_direct(const PotentialFamily& family, std::span<const Symbol> y,
                                     std::size_t n) {
  if (y.size() < n) throw LengthMismatch("observation sequence shorter than n");
  std::vector<double> weights(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    weights[i] = family.model(i).measure().log_cylinder(y.subspan(0, n));
  }
  return assemble_posterior(family.grid(), n, std::move(weights));
}

double log_partition_direct_constrained(const PotentialFamily& family, std::size_t theta_idx,
                                        std::span<const Symbol> y, std::size_t n) {
  DirectLoss loss(family);
  const double log_cyl = family.model(theta_idx).measure().log_cylinder(y.subspan(0, n));
  if (log_cyl == kNegInf) return kNegInf;
  return log_cyl - loss.path_sum(theta_idx, y, n);
}

double rate_closed_form_direct(const PotentialFamily& family, std::size_t theta_idx,
                               std::size_t theta_star_idx) {
  const GibbsModel& model = family.model(theta_idx);
  const MarkovMeasure& truth = family.model(theta_star_idx).measure();
  return 2.0 * (model.pressure() - expectation(model.potential(), truth));
}

RateEstimate rate_estimate(const std::function<double(std::uint64_t)>& rate_of_seed,
                           std::span<const std::uint64_t> seeds, int threads) {
  if (seeds.empty()) throw DomainError("rate_estimate needs at least one seed");
  std::vector<double> values(seeds.size());
  parallel_for(seeds.size(), threads, [&](std::size_t i) { values[i] = rate_of_seed(seeds[i]); });
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  const auto r = static_cast<double>(values.size());
  const double std_error = values.size() > 1 ? std::sqrt(var / (r - 1.0) / r) : 0.0;
  return RateEstimate{mean, std_error};
}

RateEstimate rate_estimate_direct(const PotentialFamily& family, std::size_t theta_idx,
                                  std::size_t theta_star_idx, std::size_t n,
                                  std::span<const std::uint64_t> seeds, int threads) {
  const auto r = static_cast<std::size_t>(family.range());
  return rate_estimate(
      [&](std::uint64_t seed) {
        const Trajectory y = sample_trajectory(family.model(theta_star_idx), n + r - 1, seed);
        return -log_partition_direct_constrained(family, theta_idx, y.symbols, n) /
               static_cast<double>(n);
      },
      seeds, threads);
}

RateEstimate rate_estimate_hidden(const PotentialFamily& family, const LossSpec& spec,
                                  std::size_t theta_idx, std::size_t theta_star_idx, std::size_t n,
                                  std::span<const std::uint64_t> seeds, int threads) {
  return rate_estimate(
      [&](std::uint64_t seed) {
        const Trajectory hidden = sample_trajectory(family.model(theta_star_idx), n, seed);
        const EmissionSequence u =
            emit(hidden, spec, theta_star_idx, seed, family.grid().point(theta_star_idx));
        const std::vector<Observation> ys = to_observations(std::span<const double>(u.values));
        return -log_partition_theta(family.model(theta_idx), spec, theta_idx, ys, 1.0) /
               static_cast<double>(n);
      },
      seeds, threads);
}

std::vector<std::size_t> theta_min(const RateTable& rates, double epsilon) {
  if (rates.v_hat.empty()) throw DomainError("rate table is empty");
  if (epsilon < 0.0) {
    double max_se = 0.0;
    for (double se : rates.std_error) max_se = std::max(max_se, se);
    epsilon = std::max(1e-9, 2.0 * max_se);
  }
  const double vmin = *std::min_element(rates.v_hat.begin(), rates.v_hat.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rates.v_hat.size(); ++i) {
    if (rates.v_hat[i] <= vmin + epsilon) out.push_back(i);
  }
  return out;
}

std::vector<ConcentrationRow> concentration_report(const std::vector<PosteriorGrid>& per_n,
                                                   std::span<const std::size_t> target,
                                                   double radius) {
  if (target.empty()) throw DomainError("concentration target set is empty");
  std::vector<ConcentrationRow> rows;
  rows.reserve(per_n.size());
  for (const PosteriorGrid& pg : per_n) {
    double outside = 0.0;
    for (std::size_t i = 0; i < pg.theta.size(); ++i) {
      double dist = kInf;
      for (std::size_t t : target) dist = std::min(dist, std::abs(pg.theta[i] - pg.theta[t]));
      if (dist > radius + 1e-12) outside += pg.masses[i];
    }
    const double bite = pg.log_mass_of(target) / static_cast<double>(pg.n);
    rows.push_back({pg.n, outside, bite});
  }
  return rows;
}

SandwichResult k2_sandwich_check(const PosteriorGrid& gibbs, const PosteriorGrid& bayes, double K,
                                 double slack) {
  if (gibbs.theta.size() != bayes.theta.size()) {
    throw ShapeMismatch("sandwich check needs posteriors on one grid");
  }
  double worst = kNegInf;
  auto check_gap = [&](double log_pi, double log_Pi) {
    if (log_pi == kNegInf && log_Pi == kNegInf) return;
    worst = std::max(worst, std::abs(log_Pi - log_pi) - 2.0 * std::log(K));
  };
  // singletons bound every set (mediant inequality); intervals exercise sums
  for (std::size_t i = 0; i < gibbs.theta.size(); ++i) {
    check_gap(gibbs.log_posterior[i], bayes.log_posterior[i]);
  }
  std::vector<std::size_t> prefix;
  for (std::size_t i = 0; i < gibbs.theta.size(); ++i) {
    prefix.push_back(i);
    check_gap(gibbs.log_mass_of(prefix), bayes.log_mass_of(prefix));
  }
  const double excess = worst == kNegInf ? 0.0 : worst;
  return SandwichResult{excess <= slack, excess};
}

bool rate_consistency_check(const PosteriorGrid& pg) {
  const double n = static_cast<double>(pg.n);
  const double full = -pg.log_Z / n;
  double best = kInf;
  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < pg.log_weights.size(); ++i) {
    const double v = -pg.log_weights[i] / n;
    if (v < best) {
      best = v;
      best_idx = i;
    }
  }
  const double g = static_cast<double>(pg.theta.size());
  const double lower = best - std::log(g) / n;
  const double upper = best - std::log(pg.prior[best_idx]) / n;
  const double tol = 1e-12 * std::max({1.0, std::abs(full), std::abs(best)});
  return full >= lower - tol && full <= upper + tol;
}

}  // namespace gibbsfit
