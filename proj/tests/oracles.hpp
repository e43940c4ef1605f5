#pragma once

// Brute-force oracles for the test suites. These deliberately avoid the
// library's transfer-matrix and forward-recursion code paths so that the
// values they produce are independent checks, not echoes.

#include <cstdint>
#include <functional>
#include <set>
#include <vector>

#include "gibbsfit/gibbs.hpp"
#include "gibbsfit/loss.hpp"
#include "gibbsfit/rng.hpp"
#include "gibbsfit/words.hpp"

namespace oracle {

// Admissible m-words by exhaustive two-sided extension with a fixed margin
// (exact for shifts whose transient parts are shorter than the margin).
std::set<gibbsfit::Word> admissible_words(int alphabet_size,
                                          const std::vector<gibbsfit::Word>& forbidden, int m,
                                          int margin = 16);

// log sum over admissible n-words of mu(w) * exp(-beta * sum_k loss(w_k, y_k)),
// summed directly in extended precision (no dynamic programming).
double log_partition_path_sum(const gibbsfit::GibbsModel& model,
                              const std::function<double(gibbsfit::Symbol, std::size_t)>& step_loss,
                              std::size_t n, double beta);

// Richardson step for a rate sequence r_n = a + b/n + o(1/n).
inline double richardson(double r_n, double r_2n) { return 2.0 * r_2n - r_n; }

// Row-stochastic perturbation of a kernel that keeps its support.
Eigen::MatrixXd perturb_kernel(const Eigen::MatrixXd& kernel, gibbsfit::CounterRng& rng,
                               double magnitude);

// Random finite-range potential table on a shift.
gibbsfit::Potential random_potential(gibbsfit::SftPtr sft, int range, gibbsfit::CounterRng& rng,
                                     double scale = 1.0);

}  // namespace oracle
