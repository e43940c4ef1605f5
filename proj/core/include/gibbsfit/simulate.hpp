#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gibbsfit/gibbs.hpp"
#include "gibbsfit/loss.hpp"

namespace gibbsfit {

/// A finite symbol path with its provenance. Paths sampled from an SFT model
/// never contain a forbidden word.
struct Trajectory {
  std::vector<Symbol> symbols;
  std::uint64_t seed = 0;
  std::string source;
};

/// Real-valued observations, optionally paired with the hidden path that
/// produced them and the generating parameter.
struct EmissionSequence {
  std::vector<double> values;
  std::optional<Trajectory> hidden;
  std::uint64_t seed = 0;
  std::optional<double> theta_star;
  std::string source;
};

/// Stationary sample: initial block from pi, then kernel steps. Output is a
/// pure function of (model, n, seed).
Trajectory sample_trajectory(const GibbsModel& model, std::size_t n, std::uint64_t seed);

/// Conditionally independent Gaussian emissions along a hidden path:
/// values[k] ~ N(m_theta(x_k), s_theta(x_k)). Requires the density kind.
EmissionSequence emit(const Trajectory& hidden, const LossSpec& spec, std::size_t theta_idx,
                      std::uint64_t seed, double theta_value);

struct MisspecifiedParams {
  double logistic_a = 3.9;
  int period = 2;
  double jitter = 0.0;
  std::vector<double> pattern;  // defaults to 0..period-1
};

/// Observation processes outside the model class:
///   logistic_binarized: x_{k+1} = a x_k (1 - x_k), symbol = 1{x_k > 1/2}
///   periodic_noise:     period-p pattern plus Gaussian jitter
std::variant<Trajectory, EmissionSequence> misspecified_source(const std::string& name,
                                                               std::size_t n, std::uint64_t seed,
                                                               const MisspecifiedParams& params = {});

}  // namespace gibbsfit
