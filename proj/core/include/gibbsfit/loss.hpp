#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gibbsfit/words.hpp"

namespace gibbsfit {

enum class LossKind { squared, discrete, neg_log_density };

/// Observation value: real-valued for the squared and density kinds, a
/// symbol for the discrete kind.
class Observation {
public:
  static Observation real(double v) { return Observation(true, v, 0); }
  static Observation symbol(Symbol s) { return Observation(false, 0.0, s); }

  bool is_real() const { return is_real_; }
  double real_value() const { return value_; }
  Symbol symbol_value() const { return symbol_; }

private:
  Observation(bool is_real, double v, Symbol s) : is_real_(is_real), value_(v), symbol_(s) {}
  bool is_real_;
  double value_;
  Symbol symbol_;
};

std::vector<Observation> to_observations(std::span<const double> values);
std::vector<Observation> to_observations(std::span<const Symbol> symbols);

/// One of the three per-state loss families, window fixed to x_0:
///   squared         |phi_theta(x_0) - y|^2
///   discrete        1{ phi(x_0) != y }      (theta-independent map)
///   neg_log_density (1/2) log(2 pi s^2) + (y - m)^2 / (2 s^2), Gaussian
///                   emission with mean m_theta(x_0), std s_theta(x_0)
class LossSpec {
public:
  /// phi: grid x alphabet matrix of observation values.
  static LossSpec squared(Eigen::MatrixXd phi);
  /// map: output symbol per alphabet symbol.
  static LossSpec discrete(std::vector<Symbol> map);
  /// Gaussian emission parameters per (theta, symbol); stds must be >= 1e-6.
  static LossSpec gaussian(Eigen::MatrixXd means, Eigen::MatrixXd stds);

  LossKind kind() const { return kind_; }
  std::size_t grid_size() const { return static_cast<std::size_t>(a_.rows()); }
  int alphabet_size() const { return static_cast<int>(a_.cols()); }

  double eval(std::size_t theta_idx, Symbol x, const Observation& y) const;
  /// ell*(y) = max over grid points and symbols of |ell(theta, x, y)|.
  double bound(const Observation& y) const;

  double gaussian_mean(std::size_t theta_idx, Symbol x) const;
  double gaussian_std(std::size_t theta_idx, Symbol x) const;
  /// log emission density, = -eval for the density kind.
  double log_density(std::size_t theta_idx, Symbol x, double u) const;

  /// Bitwise-identical observation-map rows for two grid indices.
  bool rows_identical(std::size_t i, std::size_t j) const;

private:
  LossSpec(LossKind kind, Eigen::MatrixXd a, Eigen::MatrixXd b)
      : kind_(kind), a_(std::move(a)), b_(std::move(b)) {}

  LossKind kind_;
  // squared: a_ = phi; discrete: a_ = map (1 x alphabet); gaussian: a_ = means, b_ = stds
  Eigen::MatrixXd a_;
  Eigen::MatrixXd b_;
};

/// Sum of per-state losses along paired state/observation sequences.
double loss_path_sum(const LossSpec& spec, std::size_t theta_idx, std::span<const Symbol> xs,
                     std::span<const Observation> ys);

}  // namespace gibbsfit
