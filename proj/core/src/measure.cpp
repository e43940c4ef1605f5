#include "gibbsfit/measure.hpp"

#include <cmath>
#include <limits>

#include "gibbsfit/errors.hpp"

namespace gibbsfit {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logsumexp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::exp(v[i] - m);
  return m + std::log(acc);
}
}  // namespace

MarkovMeasure::MarkovMeasure(SftPtr sft, Eigen::VectorXd stationary, Eigen::MatrixXd kernel) {
  sft_ = std::move(sft);
  stationary_ = std::move(stationary);
  kernel_ = std::move(kernel);
  finalize();
}

void MarkovMeasure::finalize() {
  const auto b = static_cast<Eigen::Index>(sft_->block_count());
  if (stationary_.size() != b || kernel_.rows() != b || kernel_.cols() != b) {
    throw ShapeMismatch("measure dimensions do not match the block count");
  }
  for (Eigen::Index u = 0; u < b; ++u) {
    if (stationary_[u] < 0.0) throw DomainError("stationary vector has a negative entry");
    for (Eigen::Index v = 0; v < b; ++v) {
      const double q = kernel_(u, v);
      if (q < 0.0 || !std::isfinite(q)) throw DomainError("kernel entry out of [0,1]");
      if (q > 0.0 && !sft_->transition(static_cast<std::size_t>(u), static_cast<std::size_t>(v))) {
        throw DomainError("kernel charges a forbidden block transition");
      }
    }
    if (std::abs(kernel_.row(u).sum() - 1.0) > 1e-12) {
      throw DomainError("kernel row " + std::to_string(u) + " does not sum to 1 within 1e-12");
    }
  }
  stationary_ /= stationary_.sum();
  const Eigen::VectorXd image = kernel_.transpose() * stationary_;
  if ((image - stationary_).lpNorm<Eigen::Infinity>() > 1e-10) {
    throw DomainError("stationary vector is not kernel-invariant within 1e-10");
  }

  if (log_stationary_.size() != b) {
    log_stationary_.resize(b);
    for (Eigen::Index u = 0; u < b; ++u) {
      log_stationary_[u] = stationary_[u] > 0.0 ? std::log(stationary_[u]) : kNegInf;
    }
  }
  if (log_kernel_.rows() != b) {
    log_kernel_.resize(b, b);
    for (Eigen::Index u = 0; u < b; ++u) {
      for (Eigen::Index v = 0; v < b; ++v) {
        log_kernel_(u, v) = kernel_(u, v) > 0.0 ? std::log(kernel_(u, v)) : kNegInf;
      }
    }
  }
}

MarkovMeasure MarkovMeasure::from_kernel(SftPtr sft, Eigen::MatrixXd kernel) {
  const auto b = kernel.rows();
  if (kernel.cols() != b) throw ShapeMismatch("kernel must be square");

  // pi P = pi by power iteration on P^T; P is primitive on the block graph.
  Eigen::VectorXd pi = Eigen::VectorXd::Constant(b, 1.0 / static_cast<double>(b));
  const int max_iter = 200000;
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd next = kernel.transpose() * pi;
    next /= next.sum();
    residual = (next - pi).lpNorm<Eigen::Infinity>();
    pi = next;
    if (residual <= 1e-15) break;
  }
  if (residual > 1e-11) {
    throw NoConvergence("stationary-vector iteration did not converge", residual);
  }
  return MarkovMeasure(std::move(sft), std::move(pi), std::move(kernel));
}

double MarkovMeasure::log_cylinder(WordView w) const {
  if (w.empty()) return 0.0;
  const int bl = sft_->block_len();
  if (static_cast<int>(w.size()) < bl) {
    // sum stationary mass over blocks extending the short word
    Eigen::VectorXd parts(static_cast<Eigen::Index>(sft_->block_count()));
    Eigen::Index count = 0;
    for (std::size_t u = 0; u < sft_->block_count(); ++u) {
      const WordView blk = sft_->block(u);
      if (std::equal(w.begin(), w.end(), blk.begin())) parts[count++] = log_stationary_[static_cast<Eigen::Index>(u)];
    }
    if (count == 0) return kNegInf;
    return logsumexp(parts.head(count));
  }
  std::size_t u = sft_->block_id(w.subspan(0, static_cast<std::size_t>(bl)));
  if (u == Sft::npos) return kNegInf;
  double acc = log_stationary_[static_cast<Eigen::Index>(u)];
  for (std::size_t k = static_cast<std::size_t>(bl); k < w.size(); ++k) {
    const std::size_t v = sft_->advance(u, w[k]);
    if (v == Sft::npos) return kNegInf;
    acc += log_kernel_(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v));
    u = v;
  }
  return acc;
}

double MarkovMeasure::cylinder_prob(WordView w) const { return std::exp(log_cylinder(w)); }

double MarkovMeasure::entropy() const {
  double h = 0.0;
  for (Eigen::Index u = 0; u < kernel_.rows(); ++u) {
    double row = 0.0;
    for (Eigen::Index v = 0; v < kernel_.cols(); ++v) {
      const double q = kernel_(u, v);
      if (q > 0.0) row += q * log_kernel_(u, v);
    }
    h -= stationary_[u] * row;
  }
  return h;
}

}  // namespace gibbsfit
