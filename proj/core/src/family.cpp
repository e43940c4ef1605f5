#include "gibbsfit/family.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "gibbsfit/errors.hpp"

namespace gibbsfit {

ThetaGrid::ThetaGrid(std::vector<double> points, std::vector<double> prior_weights)
    : points_(std::move(points)), prior_(std::move(prior_weights)) {
  if (points_.empty()) throw DomainError("theta grid must be non-empty");
  for (double p : points_) {
    if (!std::isfinite(p)) throw DomainError("grid point is not finite");
  }
  std::vector<double> sorted = points_;
  std::sort(sorted.begin(), sorted.end());
  step_ = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (sorted[i] == sorted[i + 1]) throw DomainError("grid points must be distinct");
    step_ = std::min(step_, sorted[i + 1] - sorted[i]);
  }
  if (prior_.empty()) prior_.assign(points_.size(), 1.0 / static_cast<double>(points_.size()));
  if (prior_.size() != points_.size()) {
    throw ShapeMismatch("prior length does not match grid length");
  }
  double total = 0.0;
  for (double w : prior_) {
    if (!(w > 0.0)) throw DomainError("prior weights must be strictly positive (fully supported)");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    // accept unnormalized inputs, normalize below
  }
  // normalize so the float sum is exactly 1: posterior masses then reproduce
  // the prior bitwise when all log weights coincide
  for (double& w : prior_) w /= total;
  for (int pass = 0; pass < 4; ++pass) {
    double s = 0.0;
    for (double w : prior_) s += w;
    if (s == 1.0) break;
    auto big = std::max_element(prior_.begin(), prior_.end());
    *big += 1.0 - s;
  }
}

std::optional<std::size_t> ThetaGrid::index_of(double theta, double tol) const {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (std::abs(points_[i] - theta) <= tol) return i;
  }
  return std::nullopt;
}

std::uint64_t ThetaGrid::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  for (double p : points_) mix(p);
  for (double w : prior_) mix(w);
  return h;
}

PotentialFamily::PotentialFamily(ThetaGrid grid, std::vector<Potential> potentials)
    : grid_(std::move(grid)), potentials_(std::move(potentials)) {
  if (potentials_.size() != grid_.size()) {
    throw ShapeMismatch("family needs one potential per grid point");
  }
  const Sft* sft = &potentials_.front().sft();
  const int range = potentials_.front().range();
  for (const Potential& f : potentials_) {
    if (&f.sft() != sft) throw ShapeMismatch("family potentials must share one shift");
    if (f.range() != range) throw ShapeMismatch("family potentials must share one range");
  }
  models_.reserve(potentials_.size());
  for (const Potential& f : potentials_) models_.push_back(GibbsModel::solve(f));
}

std::vector<std::vector<std::size_t>> PotentialFamily::identity_classes() const {
  std::vector<std::vector<std::size_t>> classes;
  std::vector<bool> seen(size(), false);
  for (std::size_t i = 0; i < size(); ++i) {
    if (seen[i]) continue;
    std::vector<std::size_t> cls{i};
    seen[i] = true;
    for (std::size_t j = i + 1; j < size(); ++j) {
      if (!seen[j] && potentials_[i].identical_table(potentials_[j])) {
        cls.push_back(j);
        seen[j] = true;
      }
    }
    classes.push_back(std::move(cls));
  }
  return classes;
}

PotentialFamily bernoulli_family(ThetaGrid grid) {
  constexpr double eps = 1e-3;
  for (double theta : grid.points()) {
    if (!(theta > eps && theta < 1.0 - eps)) {
      throw DomainError("bernoulli_family grid point " + std::to_string(theta) +
                        " outside (" + std::to_string(eps) + ", " + std::to_string(1.0 - eps) + ")");
    }
  }
  auto sft = std::make_shared<const Sft>(Sft::build(2, {}));
  std::vector<Potential> pots;
  pots.reserve(grid.size());
  for (double theta : grid.points()) {
    pots.emplace_back(sft, 1, std::unordered_map<std::string, double>{
                                  {"0", std::log(1.0 - theta)}, {"1", std::log(theta)}});
  }
  return PotentialFamily(std::move(grid), std::move(pots));
}

PotentialFamily markov_family(ThetaGrid t_grid, const Potential& f_a, const Potential& f_b) {
  if (&f_a.sft() != &f_b.sft() || f_a.range() != f_b.range()) {
    throw ShapeMismatch("markov_family base tables must share one shift and range");
  }
  std::vector<Potential> pots;
  pots.reserve(t_grid.size());
  for (double t : t_grid.points()) pots.push_back(Potential::affine(f_a, f_b, t));
  return PotentialFamily(std::move(t_grid), std::move(pots));
}

RegularityReport regularity_report(const PotentialFamily& family) {
  if (family.size() < 2) throw DomainError("regularity report needs at least 2 grid points");
  RegularityReport report;
  report.modulus = 0.0;
  for (std::size_t i = 0; i + 1 < family.size(); ++i) {
    const double sup = family.potential(i).sup_diff(family.potential(i + 1));
    const double dp = std::abs(family.model(i).pressure() - family.model(i + 1).pressure());
    report.rows.push_back({i, sup, dp});
    const double gap = std::abs(family.grid().point(i + 1) - family.grid().point(i));
    if (gap > 0.0) report.modulus = std::max(report.modulus, sup / gap);
  }
  return report;
}

}  // namespace gibbsfit
