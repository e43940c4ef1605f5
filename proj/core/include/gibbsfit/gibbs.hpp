#pragma once

#include <optional>

#include <Eigen/Dense>

#include "gibbsfit/measure.hpp"
#include "gibbsfit/potential.hpp"

namespace gibbsfit {

/// Dominant eigendata of a primitive nonnegative matrix by power iteration
/// with a deterministic all-ones start and a Rayleigh-quotient convergence
/// test. Throws NoConvergence (with the final residual) past max_iter.
struct PerronData {
  double lambda;
  Eigen::VectorXd right;  // L1-normalized
  Eigen::VectorXd left;   // scaled so that left . right = 1
};
PerronData perron_eigendata(const Eigen::MatrixXd& m, double rel_tol = 1e-13,
                            int max_iter = 100000);

/// Weighted block-transition matrix: entry (u,v) = A_uv * exp(f(w_uv)) where
/// w_uv is the trailing r-window of the overlap word u . v_last.
Eigen::MatrixXd transfer_matrix(const Sft& sft, const Potential& f);

/// The computable form of the Gibbs measure of a finite-range potential:
/// pressure, Perron eigendata, stationary block distribution and transition
/// kernel. Requires potential range <= block_len + 1 (re-block the shift
/// first for longer ranges).
class GibbsModel {
public:
  static GibbsModel solve(const Potential& f);

  const Sft& sft() const { return measure_.sft(); }
  const Potential& potential() const { return potential_; }
  const MarkovMeasure& measure() const { return measure_; }

  double pressure() const { return pressure_; }
  double lambda_max() const { return lambda_max_; }
  const Eigen::VectorXd& right_vec() const { return right_; }
  const Eigen::VectorXd& left_vec() const { return left_; }

  /// Potential value attached to the edge (u, v).
  double edge_potential(std::size_t u, std::size_t v) const { return edge_f_(u, v); }

  /// Empirical Gibbs constant, once an audit has stored it.
  std::optional<double> audited_K() const { return audited_K_; }
  void set_audited_K(double k) { audited_K_ = k; }

private:
  GibbsModel(Potential f, MarkovMeasure measure, double pressure, double lambda,
             Eigen::VectorXd right, Eigen::VectorXd left, Eigen::MatrixXd edge_f)
      : potential_(std::move(f)),
        measure_(std::move(measure)),
        pressure_(pressure),
        lambda_max_(lambda),
        right_(std::move(right)),
        left_(std::move(left)),
        edge_f_(std::move(edge_f)) {}

  Potential potential_;
  MarkovMeasure measure_;
  double pressure_;
  double lambda_max_;
  Eigen::VectorXd right_;
  Eigen::VectorXd left_;
  Eigen::MatrixXd edge_f_;
  std::optional<double> audited_K_;
};

/// Convenience: solve on the potential's own shift (= solve_gibbs).
inline GibbsModel solve_gibbs(const Potential& f) { return GibbsModel::solve(f); }

}  // namespace gibbsfit
