#include "gibbsfit/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gibbsfit/errors.hpp"

namespace gibbsfit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_alphabet(const Sft& a, const Sft& b) {
  if (a.alphabet_size() != b.alphabet_size()) {
    throw ShapeMismatch("measures live on different alphabets");
  }
}

// eta << mu on cylinders iff every eta-positive word of length L is
// model-admissible, L covering both block structures and the model order.
bool absolutely_continuous(const MarkovMeasure& eta, const Sft& model_sft) {
  const int len = std::max({model_sft.order(), model_sft.block_len() + 1,
                            eta.sft().block_len() + 1});
  bool ok = true;
  eta.sft().for_each_word(len, [&](WordView w) {
    if (!ok) return;
    if (eta.log_cylinder(w) == -kInf) return;
    if (!model_sft.is_word_admissible(w)) ok = false;
  });
  return ok;
}
}  // namespace

double expectation(const Potential& f, const MarkovMeasure& eta) {
  require_same_alphabet(f.sft(), eta.sft());
  double acc = 0.0;
  const auto& words = f.domain();
  const auto& vals = f.values();
  for (std::size_t i = 0; i < words.size(); ++i) {
    const double p = eta.cylinder_prob(words[i]);
    if (p > 0.0) acc += p * vals[i];
  }
  return acc;
}

double divergence_rate(const MarkovMeasure& eta, const GibbsModel& model) {
  require_same_alphabet(eta.sft(), model.sft());
  if (!absolutely_continuous(eta, model.sft())) return kInf;
  return model.pressure() - eta.entropy() - expectation(model.potential(), eta);
}

double kl_rate_empirical(const MarkovMeasure& eta, const GibbsModel& model, int n,
                         std::size_t cap) {
  require_same_alphabet(eta.sft(), model.sft());
  if (n < 1) throw DomainError("kl_rate_empirical needs n >= 1");
  double acc = 0.0;
  bool diverged = false;
  eta.sft().for_each_word(n, [&](WordView w) {
    if (diverged) return;
    const double log_e = eta.log_cylinder(w);
    if (log_e == -kInf) return;
    const double log_m = model.measure().log_cylinder(w);
    if (log_m == -kInf) {
      diverged = true;
      return;
    }
    acc += std::exp(log_e) * (log_e - log_m);
  }, cap);
  return diverged ? kInf : acc / n;
}

GibbsAuditReport gibbs_constant_audit(GibbsModel& model, int m_max, std::size_t cap) {
  if (m_max < 1) throw DomainError("audit depth must be >= 1");
  const Sft& sft = model.sft();
  const Potential& f = model.potential();
  const int r = f.range();
  const double pressure = model.pressure();

  if (sft.word_count(m_max) > static_cast<double>(cap)) {
    throw ResourceLimit("audit depth " + std::to_string(m_max) + " enumerates more than " +
                        std::to_string(cap) + " words");
  }

  GibbsAuditReport report;
  report.rows.reserve(static_cast<std::size_t>(m_max));
  double k_env = 1.0;
  for (int m = 1; m <= m_max; ++m) {
    double lo = kInf, hi = -kInf;
    // context words carry the r-1 extra symbols the Birkhoff sum reads
    sft.for_each_word(m + r - 1, [&](WordView w) {
      const double log_mu = model.measure().log_cylinder(w.subspan(0, static_cast<std::size_t>(m)));
      const double log_ratio = log_mu - (-pressure * m + f.birkhoff_sum(w, m));
      const double ratio = std::exp(log_ratio);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    });
    report.rows.push_back({m, lo, hi});
    k_env = std::max({k_env, hi, 1.0 / lo});
  }
  report.K = k_env;
  model.set_audited_K(k_env);
  return report;
}

}  // namespace gibbsfit
