#pragma once

#include <Eigen/Dense>

#include "gibbsfit/potential.hpp"
#include "gibbsfit/sft.hpp"

namespace gibbsfit {

/// Shift-invariant block-Markov measure: stationary vector and row-stochastic
/// kernel over the admissible blocks of a shift. Immutable after construction.
class MarkovMeasure {
public:
  /// Validates row sums (1e-12), stationarity (1e-10) and support containment.
  MarkovMeasure(SftPtr sft, Eigen::VectorXd stationary, Eigen::MatrixXd kernel);

  /// Computes the stationary vector of a row-stochastic kernel by power
  /// iteration on its transpose.
  static MarkovMeasure from_kernel(SftPtr sft, Eigen::MatrixXd kernel);

  const Sft& sft() const { return *sft_; }
  const SftPtr& sft_ptr() const { return sft_; }
  const Eigen::VectorXd& stationary() const { return stationary_; }
  const Eigen::MatrixXd& kernel() const { return kernel_; }
  double log_stationary(std::size_t u) const { return log_stationary_[u]; }
  double log_kernel(std::size_t u, std::size_t v) const { return log_kernel_(u, v); }

  /// log mu([w]); -inf for inadmissible words. Words shorter than the block
  /// length are summed over block completions.
  double log_cylinder(WordView w) const;
  double cylinder_prob(WordView w) const;

  /// Kolmogorov-Sinai entropy of the block chain:
  /// -sum_u pi(u) sum_v Q(u,v) log Q(u,v).
  double entropy() const;

private:
  MarkovMeasure() = default;
  void finalize();  // normalizes pi, fills logs, validates

  SftPtr sft_;
  Eigen::VectorXd stationary_;
  Eigen::MatrixXd kernel_;
  Eigen::VectorXd log_stationary_;
  Eigen::MatrixXd log_kernel_;

  friend class GibbsModel;
};

}  // namespace gibbsfit
