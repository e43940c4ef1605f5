#include "gibbsfit/loss.hpp"

#include <cmath>
#include <numbers>

#include "gibbsfit/errors.hpp"

namespace gibbsfit {

std::vector<Observation> to_observations(std::span<const double> values) {
  std::vector<Observation> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(Observation::real(v));
  return out;
}

std::vector<Observation> to_observations(std::span<const Symbol> symbols) {
  std::vector<Observation> out;
  out.reserve(symbols.size());
  for (Symbol s : symbols) out.push_back(Observation::symbol(s));
  return out;
}

LossSpec LossSpec::squared(Eigen::MatrixXd phi) {
  if (phi.rows() < 1 || phi.cols() < 1) throw ShapeMismatch("squared loss needs a grid x alphabet map");
  return LossSpec(LossKind::squared, std::move(phi), {});
}

LossSpec LossSpec::discrete(std::vector<Symbol> map) {
  if (map.empty()) throw ShapeMismatch("discrete loss needs a per-symbol output map");
  Eigen::MatrixXd a(1, static_cast<Eigen::Index>(map.size()));
  for (std::size_t i = 0; i < map.size(); ++i) a(0, static_cast<Eigen::Index>(i)) = map[i];
  return LossSpec(LossKind::discrete, std::move(a), {});
}

LossSpec LossSpec::gaussian(Eigen::MatrixXd means, Eigen::MatrixXd stds) {
  if (means.rows() != stds.rows() || means.cols() != stds.cols() || means.rows() < 1) {
    throw ShapeMismatch("gaussian loss needs matching grid x alphabet mean/std maps");
  }
  for (Eigen::Index i = 0; i < stds.rows(); ++i) {
    for (Eigen::Index j = 0; j < stds.cols(); ++j) {
      if (!(stds(i, j) >= 1e-6)) {
        throw DomainError("emission std below the 1e-6 floor");
      }
    }
  }
  return LossSpec(LossKind::neg_log_density, std::move(means), std::move(stds));
}

double LossSpec::eval(std::size_t theta_idx, Symbol x, const Observation& y) const {
  switch (kind_) {
    case LossKind::squared: {
      if (!y.is_real()) throw KindMismatch("squared loss expects a real observation");
      const double d = a_(static_cast<Eigen::Index>(theta_idx), x) - y.real_value();
      return d * d;
    }
    case LossKind::discrete: {
      if (y.is_real()) throw KindMismatch("discrete loss expects a symbol observation");
      return a_(0, x) == static_cast<double>(y.symbol_value()) ? 0.0 : 1.0;
    }
    case LossKind::neg_log_density: {
      if (!y.is_real()) throw KindMismatch("density loss expects a real observation");
      const double m = a_(static_cast<Eigen::Index>(theta_idx), x);
      const double s = b_(static_cast<Eigen::Index>(theta_idx), x);
      const double z = (y.real_value() - m) / s;
      return 0.5 * std::log(2.0 * std::numbers::pi * s * s) + 0.5 * z * z;
    }
  }
  throw KindMismatch("unknown loss kind");
}

double LossSpec::bound(const Observation& y) const {
  double out = 0.0;
  const std::size_t g = kind_ == LossKind::discrete ? 1 : grid_size();
  for (std::size_t i = 0; i < g; ++i) {
    for (int x = 0; x < alphabet_size(); ++x) {
      out = std::max(out, std::abs(eval(i, static_cast<Symbol>(x), y)));
    }
  }
  return out;
}

double LossSpec::gaussian_mean(std::size_t theta_idx, Symbol x) const {
  if (kind_ != LossKind::neg_log_density) throw KindMismatch("not a density loss");
  return a_(static_cast<Eigen::Index>(theta_idx), x);
}

double LossSpec::gaussian_std(std::size_t theta_idx, Symbol x) const {
  if (kind_ != LossKind::neg_log_density) throw KindMismatch("not a density loss");
  return b_(static_cast<Eigen::Index>(theta_idx), x);
}

double LossSpec::log_density(std::size_t theta_idx, Symbol x, double u) const {
  return -eval(theta_idx, x, Observation::real(u));
}

bool LossSpec::rows_identical(std::size_t i, std::size_t j) const {
  if (kind_ == LossKind::discrete) return true;
  const auto ii = static_cast<Eigen::Index>(i);
  const auto jj = static_cast<Eigen::Index>(j);
  if ((a_.row(ii).array() != a_.row(jj).array()).any()) return false;
  if (kind_ == LossKind::neg_log_density && (b_.row(ii).array() != b_.row(jj).array()).any()) {
    return false;
  }
  return true;
}

double loss_path_sum(const LossSpec& spec, std::size_t theta_idx, std::span<const Symbol> xs,
                     std::span<const Observation> ys) {
  if (xs.size() != ys.size()) throw LengthMismatch("state and observation sequences differ in length");
  if (xs.empty()) throw LengthMismatch("loss_path_sum needs n >= 1");
  double acc = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) acc += spec.eval(theta_idx, xs[k], ys[k]);
  return acc;
}

}  // namespace gibbsfit
