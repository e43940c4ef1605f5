#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gibbsfit/family.hpp"
#include "gibbsfit/loss.hpp"

namespace gibbsfit {

/// Posterior over the theta grid at one observation length: per-theta log
/// partition values, the log normalizer, and normalized masses.
struct PosteriorGrid {
  std::vector<double> theta;
  std::vector<double> prior;
  std::size_t n = 0;
  std::vector<double> log_weights;    // per-theta log Z_n^theta (prior excluded)
  double log_Z = 0.0;                 // log sum_theta prior * exp(log_weights)
  std::vector<double> log_posterior;  // log prior + log_weights - log_Z
  std::vector<double> masses;         // prob domain; sums to 1

  double mass_of(std::span<const std::size_t> indices) const;
  double log_mass_of(std::span<const std::size_t> indices) const;
  std::size_t mode() const;
};

/// Assembles a PosteriorGrid from per-theta log weights. Masses come from a
/// max-subtracted softmax, so equal weights reproduce the prior bitwise.
PosteriorGrid assemble_posterior(const ThetaGrid& grid, std::size_t n,
                                 std::vector<double> log_weights);

/// log integral exp(-beta ell_n(theta, x, y)) d mu_theta(x) by the log-domain
/// forward recursion over blocks; O(n B^2). The per-step minimum of the loss
/// is factored out, so losses that do not depend on the hidden state (and
/// beta = 0) telescope exactly.
double log_partition_theta(const GibbsModel& model, const LossSpec& spec, std::size_t theta_idx,
                           std::span<const Observation> ys, double beta = 1.0);

/// Same recursion reporting log Z_n at each requested prefix length.
std::vector<double> log_partition_prefixes(const GibbsModel& model, const LossSpec& spec,
                                           std::size_t theta_idx, std::span<const Observation> ys,
                                           std::span<const std::size_t> lengths, double beta = 1.0);

/// Gibbs posterior over the grid from a per-state loss (Bayes posterior when
/// the loss is the negative log emission density and beta = 1).
PosteriorGrid gibbs_posterior(const PotentialFamily& family, const LossSpec& spec,
                              std::span<const Observation> ys, double beta = 1.0,
                              int threads = 1);

PosteriorGrid bayes_posterior_hidden(const PotentialFamily& family, const LossSpec& spec,
                                     std::span<const double> emissions, int threads = 1);

/// Direct-observation loss ell(theta, w) = P(f_theta) - f_theta(w) on
/// observation windows of the potential range.
class DirectLoss {
public:
  explicit DirectLoss(const PotentialFamily& family) : family_(&family) {}
  int window() const { return family_->range(); }
  double eval(std::size_t theta_idx, WordView window) const;
  /// ell_n = sum_{k<n} ell(theta, y_k..y_{k+r-1}); needs |y| >= n + r - 1.
  double path_sum(std::size_t theta_idx, std::span<const Symbol> y, std::size_t n) const;

private:
  const PotentialFamily* family_;
};

/// Gibbs posterior for directly observed symbols: weights exp(-beta ell_n)
/// with the hidden integral skipped (trivial hidden component).
PosteriorGrid gibbs_posterior_direct(const PotentialFamily& family, std::span<const Symbol> y,
                                     std::size_t n, double beta = 1.0);

/// Standard Bayes posterior from cylinder likelihoods mu_theta([y_0^{n-1}]).
/// Throws InadmissibleObservation when every grid model nulls the cylinder.
PosteriorGrid bayes_posterior_direct(const PotentialFamily& family, std::span<const Symbol> y,
                                     std::size_t n);

/// Per-theta partition function of the direct scenario for rate estimation:
/// log of the Gibbs-loss-weighted observed-cylinder mass,
///   log mu_theta([y_0^{n-1}]) - ell_n(theta, y).
/// Its -(1/n) log converges to rate_closed_form_direct(theta, theta*).
double log_partition_direct_constrained(const PotentialFamily& family, std::size_t theta_idx,
                                        std::span<const Symbol> y, std::size_t n);

/// Closed-form direct-case rate: 2 (P(f_theta) - integral f_theta d mu_theta*).
double rate_closed_form_direct(const PotentialFamily& family, std::size_t theta_idx,
                               std::size_t theta_star_idx);

struct RateEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Mean and standard error over replicate seeds of a per-replicate rate.
RateEstimate rate_estimate(const std::function<double(std::uint64_t)>& rate_of_seed,
                           std::span<const std::uint64_t> seeds, int threads = 1);

/// Direct case: observations drawn from mu_theta*, rate of the constrained
/// per-theta partition function at length n.
RateEstimate rate_estimate_direct(const PotentialFamily& family, std::size_t theta_idx,
                                  std::size_t theta_star_idx, std::size_t n,
                                  std::span<const std::uint64_t> seeds, int threads = 1);

/// Hidden case: emissions drawn at theta*, rate of -(1/n) log p_theta.
RateEstimate rate_estimate_hidden(const PotentialFamily& family, const LossSpec& spec,
                                  std::size_t theta_idx, std::size_t theta_star_idx, std::size_t n,
                                  std::span<const std::uint64_t> seeds, int threads = 1);

struct RateTable {
  std::vector<double> theta;
  std::vector<double> v_hat;
  std::vector<double> std_error;
  std::vector<double> v_closed;  // NaN where no closed form applies
  std::size_t n_used = 0;
};

/// Grid points with V <= min V + epsilon; epsilon < 0 selects the default
/// rule max(1e-9, 2 max stderr).
std::vector<std::size_t> theta_min(const RateTable& rates, double epsilon = -1.0);

struct ConcentrationRow {
  std::size_t n;
  double outside_mass;      // posterior mass farther than radius from the target set
  double target_mass_rate;  // (1/n) log pi_n(target)
};

std::vector<ConcentrationRow> concentration_report(const std::vector<PosteriorGrid>& per_n,
                                                   std::span<const std::size_t> target,
                                                   double radius);

struct SandwichResult {
  bool holds;
  double max_excess;  // max over checked sets of |log Pi - log pi| - 2 log K
};

/// K^2 sandwich between the Gibbs and Bayes posteriors, checked on every
/// singleton (which bounds every set) plus interval unions.
SandwichResult k2_sandwich_check(const PosteriorGrid& gibbs, const PosteriorGrid& bayes, double K,
                                 double slack = 1e-9);

/// Exact logsumexp bracket of the full-grid partition function by the best
/// per-theta one (consistency of -(1/n) log Z_n with min_theta of the rates).
bool rate_consistency_check(const PosteriorGrid& pg);

}  // namespace gibbsfit
