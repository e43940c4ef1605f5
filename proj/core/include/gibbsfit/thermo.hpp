#pragma once

#include <vector>

#include "gibbsfit/gibbs.hpp"
#include "gibbsfit/measure.hpp"

namespace gibbsfit {

/// KS entropy of a block-Markov measure.
inline double entropy(const MarkovMeasure& eta) { return eta.entropy(); }

/// Integral of a finite-range potential: sum over admissible r-words of
/// eta-cylinder mass times the table value.
double expectation(const Potential& f, const MarkovMeasure& eta);

/// Relative divergence rate D(eta : mu_f) = P(f) - h(eta) - integral(f, eta)
/// for the product joining / direct-observation case. Returns +infinity when
/// eta charges a word that is inadmissible for the model shift. Nonnegative;
/// zero iff eta is the model's own Gibbs measure.
double divergence_rate(const MarkovMeasure& eta, const GibbsModel& model);

/// Depth-n empirical divergence (1/n) sum_w eta(w) log(eta(w)/mu(w)) over
/// admissible n-words; +infinity if eta charges a mu-null word.
double kl_rate_empirical(const MarkovMeasure& eta, const GibbsModel& model, int n,
                         std::size_t cap = Sft::kDefaultWordCap);

struct GibbsAuditRow {
  int m;
  double ratio_min;
  double ratio_max;
};

struct GibbsAuditReport {
  std::vector<GibbsAuditRow> rows;
  double K = 1.0;  // max over m of max(ratio_max, 1/ratio_min)
};

/// Gibbs-property audit: for each m <= m_max, the envelope over admissible
/// words of mu(w[0,m-1]) / exp(-P m + S_m f). Stores K on the model.
GibbsAuditReport gibbs_constant_audit(GibbsModel& model, int m_max,
                                      std::size_t cap = std::size_t{1} << 22);

}  // namespace gibbsfit
