#include "gibbsfit/gibbs.hpp"

#include <cmath>
#include <limits>

#include "gibbsfit/errors.hpp"

namespace gibbsfit {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Edge potential values: f on the trailing r-window of u . v_last.
Eigen::MatrixXd edge_values(const Sft& sft, const Potential& f) {
  const auto b = static_cast<Eigen::Index>(sft.block_count());
  const int bl = sft.block_len();
  const int r = f.range();
  if (r > bl + 1) {
    throw DomainError("potential range " + std::to_string(r) +
                      " exceeds block_len+1 = " + std::to_string(bl + 1) +
                      "; re-block the shift first");
  }
  Eigen::MatrixXd vals = Eigen::MatrixXd::Constant(b, b, kNegInf);
  for (Eigen::Index u = 0; u < b; ++u) {
    const WordView bu = sft.block(static_cast<std::size_t>(u));
    Word overlap(bu.begin(), bu.end());
    overlap.push_back(0);
    for (Eigen::Index v = 0; v < b; ++v) {
      if (!sft.transition(static_cast<std::size_t>(u), static_cast<std::size_t>(v))) continue;
      overlap[static_cast<std::size_t>(bl)] = sft.block(static_cast<std::size_t>(v)).back();
      vals(u, v) = f.value(WordView(overlap).subspan(overlap.size() - static_cast<std::size_t>(r)));
    }
  }
  return vals;
}
}  // namespace

PerronData perron_eigendata(const Eigen::MatrixXd& m, double rel_tol, int max_iter) {
  const Eigen::Index b = m.rows();
  if (m.cols() != b || b == 0) throw ShapeMismatch("perron_eigendata requires a square matrix");

  Eigen::VectorXd right = Eigen::VectorXd::Constant(b, 1.0 / static_cast<double>(b));
  Eigen::VectorXd left = right;
  double residual = std::numeric_limits<double>::infinity();

  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd mr = m * right;
    const Eigen::VectorXd ml = m.transpose() * left;
    const double lambda = left.dot(mr) / left.dot(right);
    if (!std::isfinite(lambda) || lambda <= 0.0) {
      throw NoConvergence("power iteration collapsed (matrix not primitive?)", residual);
    }
    const double res_r = (mr - lambda * right).lpNorm<Eigen::Infinity>() /
                         (lambda * right.lpNorm<Eigen::Infinity>());
    const double res_l = (ml - lambda * left).lpNorm<Eigen::Infinity>() /
                         (lambda * left.lpNorm<Eigen::Infinity>());
    residual = std::max(res_r, res_l);
    if (residual <= rel_tol) {
      Eigen::VectorXd r = right;
      Eigen::VectorXd l = left;
      l /= l.dot(r);
      return PerronData{lambda, std::move(r), std::move(l)};
    }
    right = mr / mr.lpNorm<1>();
    left = ml / ml.lpNorm<1>();
  }
  throw NoConvergence("power iteration did not converge in " + std::to_string(max_iter) +
                          " iterations",
                      residual);
}

Eigen::MatrixXd transfer_matrix(const Sft& sft, const Potential& f) {
  const Eigen::MatrixXd vals = edge_values(sft, f);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(vals.rows(), vals.cols());
  for (Eigen::Index u = 0; u < vals.rows(); ++u) {
    for (Eigen::Index v = 0; v < vals.cols(); ++v) {
      if (vals(u, v) != kNegInf) m(u, v) = std::exp(vals(u, v));
    }
  }
  return m;
}

GibbsModel GibbsModel::solve(const Potential& f) {
  const Sft& sft = f.sft();
  const auto b = static_cast<Eigen::Index>(sft.block_count());
  const Eigen::MatrixXd edge_f = edge_values(sft, f);

  // shift the potential into a safe exponent range; undone in the pressure
  const double shift = (f.max_value() > 200.0 || f.min_value() < -200.0) ? f.max_value() : 0.0;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(b, b);
  for (Eigen::Index u = 0; u < b; ++u) {
    for (Eigen::Index v = 0; v < b; ++v) {
      if (edge_f(u, v) != kNegInf) m(u, v) = std::exp(edge_f(u, v) - shift);
    }
  }

  PerronData pd = perron_eigendata(m);
  const double pressure = std::log(pd.lambda) + shift;

  // Q(u,v) = A_uv e^{f} r(v) / (lambda r(u)); assembled in log domain so the
  // kernel and its logs agree to the bit
  Eigen::VectorXd log_r(b);
  for (Eigen::Index u = 0; u < b; ++u) log_r[u] = std::log(pd.right[u]);
  Eigen::MatrixXd log_q = Eigen::MatrixXd::Constant(b, b, kNegInf);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(b, b);
  for (Eigen::Index u = 0; u < b; ++u) {
    for (Eigen::Index v = 0; v < b; ++v) {
      if (edge_f(u, v) == kNegInf) continue;
      log_q(u, v) = edge_f(u, v) + log_r[v] - log_r[u] - pressure;
      q(u, v) = std::exp(log_q(u, v));
    }
  }

  Eigen::VectorXd pi(b);
  for (Eigen::Index u = 0; u < b; ++u) pi[u] = pd.left[u] * pd.right[u];

  MarkovMeasure meas;
  meas.sft_ = f.sft_ptr();
  meas.stationary_ = std::move(pi);
  meas.kernel_ = std::move(q);
  const auto nb = b;
  meas.log_kernel_ = std::move(log_q);
  meas.log_stationary_.resize(nb);
  meas.stationary_ /= meas.stationary_.sum();
  for (Eigen::Index u = 0; u < nb; ++u) {
    meas.log_stationary_[u] =
        meas.stationary_[u] > 0.0 ? std::log(meas.stationary_[u]) : kNegInf;
  }
  meas.finalize();

  return GibbsModel(f, std::move(meas), pressure, std::exp(pressure), std::move(pd.right),
                    std::move(pd.left), edge_f);
}

}  // namespace gibbsfit
