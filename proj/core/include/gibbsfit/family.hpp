#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gibbsfit/gibbs.hpp"
#include "gibbsfit/potential.hpp"

namespace gibbsfit {

/// Discretized parameter space: ordered distinct points with a strictly
/// positive prior, normalized so the weights float-sum to exactly 1.
class ThetaGrid {
public:
  explicit ThetaGrid(std::vector<double> points, std::vector<double> prior_weights = {});

  std::size_t size() const { return points_.size(); }
  double point(std::size_t i) const { return points_[i]; }
  const std::vector<double>& points() const { return points_; }
  double prior(std::size_t i) const { return prior_[i]; }
  const std::vector<double>& prior_weights() const { return prior_; }

  /// Smallest gap between consecutive sorted points ("one grid step").
  double step() const { return step_; }
  std::optional<std::size_t> index_of(double theta, double tol = 1e-12) const;
  /// FNV-1a over the point bytes, for run headers.
  std::uint64_t hash() const;

private:
  std::vector<double> points_;
  std::vector<double> prior_;
  double step_;
};

/// A parametrized family of potentials over a theta grid, all on one shift
/// with one common range. Grid models are solved eagerly at construction.
class PotentialFamily {
public:
  PotentialFamily(ThetaGrid grid, std::vector<Potential> potentials);

  const ThetaGrid& grid() const { return grid_; }
  const Sft& sft() const { return potentials_.front().sft(); }
  const SftPtr& sft_ptr() const { return potentials_.front().sft_ptr(); }
  std::size_t size() const { return potentials_.size(); }
  int range() const { return potentials_.front().range(); }

  const Potential& potential(std::size_t i) const { return potentials_[i]; }
  const GibbsModel& model(std::size_t i) const { return models_[i]; }
  GibbsModel& model(std::size_t i) { return models_[i]; }

  /// Groups of grid indices whose potential tables are bitwise identical.
  std::vector<std::vector<std::size_t>> identity_classes() const;

private:
  ThetaGrid grid_;
  std::vector<Potential> potentials_;
  std::vector<GibbsModel> models_;
};

/// Bernoulli(theta) family on the full 2-shift:
/// f_theta(x) = x_0 log(theta) + (1 - x_0) log(1 - theta). Grid points must
/// lie in (1e-3, 1 - 1e-3).
PotentialFamily bernoulli_family(ThetaGrid grid);

/// Affine interpolation f_t = (1-t) f_a + t f_b over the grid of t values.
PotentialFamily markov_family(ThetaGrid t_grid, const Potential& f_a, const Potential& f_b);

struct RegularityRow {
  std::size_t i;          // adjacent pair (i, i+1)
  double sup_diff;        // ||f_i - f_{i+1}||_inf
  double pressure_diff;   // |P_i - P_{i+1}|, bounded by sup_diff
};

struct RegularityReport {
  std::vector<RegularityRow> rows;
  double modulus;  // max over pairs of sup_diff / grid spacing
};

RegularityReport regularity_report(const PotentialFamily& family);

}  // namespace gibbsfit
