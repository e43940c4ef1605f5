#include <doctest.h>

#include <cmath>

#include "gibbsfit/errors.hpp"
#include "gibbsfit/posterior.hpp"
#include "gibbsfit/simulate.hpp"
#include "gibbsfit/thermo.hpp"
#include "oracles.hpp"

using namespace gibbsfit;

namespace {

Word W(const char* s) { return word_from_string(s); }

SftPtr full_shift() { return std::make_shared<const Sft>(Sft::build(2, {})); }
SftPtr golden_mean() { return std::make_shared<const Sft>(Sft::build(2, {W("11")})); }

std::vector<double> decade_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 9; ++i) g.push_back(i / 10.0);
  return g;
}

double binary_entropy(double p) { return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p); }

LossSpec zero_loss(std::size_t grid, int alphabet) {
  return LossSpec::squared(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid), alphabet));
}

std::vector<Observation> zero_obs(std::size_t n) {
  return std::vector<Observation>(n, Observation::real(0.0));
}

}  // namespace

TEST_CASE("log partition: zero loss integrates to exactly one") {
  const PotentialFamily fam = bernoulli_family(ThetaGrid(decade_grid()));
  const LossSpec spec = zero_loss(fam.size(), 2);
  for (std::size_t n : {1u, 7u, 100u}) {
    for (std::size_t i : {0u, 4u, 8u}) {
      CHECK(log_partition_theta(fam.model(i), spec, i, zero_obs(n)) == 0.0);
    }
  }
}

TEST_CASE("log partition: two-step discrete example") {
  const PotentialFamily fam = bernoulli_family(ThetaGrid({0.5}));
  const LossSpec spec = LossSpec::discrete({0, 1});
  const std::vector<Observation> ys{Observation::symbol(0), Observation::symbol(0)};
  const double expect = 2.0 * std::log((1.0 + std::exp(-1.0)) / 2.0);
  const double got = log_partition_theta(fam.model(0), spec, 0, ys);
  CHECK(got == doctest::Approx(expect).epsilon(1e-12));
  CHECK(std::exp(got) == doctest::Approx(0.467772).epsilon(1e-5));

  // against the explicit 4-path sum
  const double brute = oracle::log_partition_path_sum(
      fam.model(0), [&](Symbol x, std::size_t k) { return spec.eval(0, x, ys[k]); }, 2, 1.0);
  CHECK(got == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("log partition: single-step reduction") {
  const PotentialFamily fam = bernoulli_family(ThetaGrid({0.3}));
  Eigen::MatrixXd phi(1, 2);
  phi << 0.25, 0.75;
  const LossSpec spec = LossSpec::squared(phi);
  const std::vector<Observation> ys{Observation::real(0.5)};
  const auto& mu = fam.model(0).measure();
  const double direct = std::log(mu.stationary()[0] * std::exp(-spec.eval(0, 0, ys[0])) +
                                 mu.stationary()[1] * std::exp(-spec.eval(0, 1, ys[0])));
  CHECK(log_partition_theta(fam.model(0), spec, 0, ys) ==
        doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("log partition matches brute-force path sums across models and losses") {
  CounterRng rng(0xabcdef);
  std::vector<PotentialFamily> fams;
  fams.push_back(bernoulli_family(ThetaGrid({0.3, 0.6})));
  {
    const auto gm = golden_mean();
    std::vector<Potential> pots{oracle::random_potential(gm, 2, rng),
                                oracle::random_potential(gm, 2, rng)};
    fams.emplace_back(ThetaGrid({0.0, 1.0}), std::move(pots));
  }
  Eigen::MatrixXd phi(2, 2), means(2, 2), stds(2, 2);
  phi << 0.1, 0.9, -0.4, 1.3;
  means << 0.0, 1.0, -0.5, 0.5;
  stds << 0.7, 0.7, 1.2, 0.4;
  const std::vector<LossSpec> specs{LossSpec::squared(phi), LossSpec::discrete({1, 0}),
                                    LossSpec::gaussian(means, stds)};
  for (const auto& fam : fams) {
    for (const auto& spec : specs) {
      for (std::size_t n : {1u, 3u, 9u}) {
        std::vector<Observation> ys;
        for (std::size_t k = 0; k < n; ++k) {
          ys.push_back(spec.kind() == LossKind::discrete
                           ? Observation::symbol(static_cast<Symbol>(rng.next_u64() % 2))
                           : Observation::real(2.0 * rng.uniform() - 1.0));
        }
        for (double beta : {0.5, 1.0, 2.0}) {
          for (std::size_t i = 0; i < fam.size(); ++i) {
            const double fast = log_partition_theta(fam.model(i), spec, i, ys, beta);
            const double brute = oracle::log_partition_path_sum(
                fam.model(i),
                [&](Symbol x, std::size_t k) { return spec.eval(i, x, ys[k]); }, n, beta);
            CHECK(fast == doctest::Approx(brute).epsilon(1e-9));
          }
        }
      }
    }
  }
}

TEST_CASE("log partition prefix recording agrees with fresh runs") {
  const PotentialFamily fam = bernoulli_family(ThetaGrid({0.4}));
  Eigen::MatrixXd means(1, 2), stds(1, 2);
  means << 0.0, 1.0;
  stds << 0.5, 0.5;
  const LossSpec spec = LossSpec::gaussian(means, stds);
  CounterRng rng(5);
  std::vector<Observation> ys;
  for (int k = 0; k < 64; ++k) ys.push_back(Observation::real(rng.normal()));
  const std::vector<std::size_t> lens{1, 2, 17, 64};
  const auto batch = log_partition_prefixes(fam.model(0), spec, 0, ys, lens);
  for (std::size_t j = 0; j < lens.size(); ++j) {
    const auto prefix = std::span<const Observation>(ys).subspan(0, lens[j]);
    CHECK(batch[j] == log_partition_theta(fam.model(0), spec, 0, prefix));
  }
}

TEST_CASE("infinite losses annihilate paths correctly") {
  const PotentialFamily fam = bernoulli_family(ThetaGrid({0.3}));
  SUBCASE("one symbol blocked: only the surviving path contributes") {
    Eigen::MatrixXd phi(1, 2);
    phi << 0.0, 1e200;  // (phi - y)^2 overflows to +inf for symbol 1
    const LossSpec spec = LossSpec::squared(phi);
    const std::vector<Observation> ys(6, Observation::real(0.0));
    const double got = log_partition_theta(fam.model(0), spec, 0, ys);
    const double brute = oracle::log_partition_path_sum(
        fam.model(0), [&](Symbol x, std::size_t k) { return spec.eval(0, x, ys[k]); }, 6, 1.0);
    CHECK(got == doctest::Approx(6 * std::log(0.7)).epsilon(1e-12));
    CHECK(got == doctest::Approx(brute).epsilon(1e-12));
  }
  SUBCASE("every symbol blocked: the partition function vanishes") {
    Eigen::MatrixXd phi(1, 2);
    phi << 1e200, 1e200;
    const LossSpec spec = LossSpec::squared(phi);
    const std::vector<Observation> ys(3, Observation::real(0.0));
    CHECK(log_partition_theta(fam.model(0), spec, 0, ys) ==
          -std::numeric_limits<double>::infinity());
  }
}

TEST_CASE("NaN losses are rejected") {
  const PotentialFamily fam = bernoulli_family(ThetaGrid({0.5}));
  Eigen::MatrixXd phi(1, 2);
  phi << std::numeric_limits<double>::quiet_NaN(), 0.0;
  const LossSpec spec = LossSpec::squared(phi);
  CHECK_THROWS_AS(log_partition_theta(fam.model(0), spec, 0, zero_obs(3)), NonFinite);
}

TEST_CASE("trivial cases return the prior exactly") {
  const ThetaGrid grid(decade_grid(), {1, 2, 3, 4, 5, 6, 7, 8, 9});
  const PotentialFamily fam = bernoulli_family(grid);

  SUBCASE("beta = 0") {
    Eigen::MatrixXd phi = Eigen::MatrixXd::Random(9, 2);
    const PosteriorGrid pg =
        gibbs_posterior(fam, LossSpec::squared(phi), zero_obs(50), /*beta=*/0.0);
    for (std::size_t i = 0; i < fam.size(); ++i) {
      CHECK(pg.masses[i] == fam.grid().prior(i));
      CHECK(pg.log_weights[i] == 0.0);
    }
    CHECK(pg.log_Z == 0.0);
  }
  SUBCASE("identically zero loss: Z_n = 1 exactly") {
    const PosteriorGrid pg = gibbs_posterior(fam, zero_loss(fam.size(), 2), zero_obs(200));
    CHECK(pg.log_Z == 0.0);
    for (std::size_t i = 0; i < fam.size(); ++i) CHECK(pg.masses[i] == fam.grid().prior(i));
  }
  SUBCASE("theta-independent loss cancels bitwise") {
    // same observation map at every grid point and symbol
    Eigen::MatrixXd phi = Eigen::MatrixXd::Constant(9, 2, 0.37);
    CounterRng rng(3);
    std::vector<Observation> ys;
    for (int k = 0; k < 50; ++k) ys.push_back(Observation::real(rng.normal()));
    const PosteriorGrid pg = gibbs_posterior(fam, LossSpec::squared(phi), ys);
    for (std::size_t i = 1; i < fam.size(); ++i) CHECK(pg.log_weights[i] == pg.log_weights[0]);
    for (std::size_t i = 0; i < fam.size(); ++i) CHECK(pg.masses[i] == fam.grid().prior(i));
  }
}

TEST_CASE("direct loss evaluator") {
  const PotentialFamily fam = bernoulli_family(ThetaGrid({0.3, 0.5}));
  const DirectLoss loss(fam);
  CHECK(loss.window() == 1);
  // pressure is 0: ell(theta, 1) = -log theta
  CHECK(loss.eval(0, W("1")) == doctest::Approx(-std::log(0.3)).epsilon(1e-12));
  CHECK(loss.eval(1, W("0")) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(loss.eval(1, W("1")) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  SUBCASE("constant potentials on the one-point shift give an identically zero loss") {
    // pressure of a constant c is h_top + c, so the loss vanishes exactly
    // when the shift is trivial (a single fixed point)
    const auto point = std::make_shared<const Sft>(Sft::build(2, {W("01"), W("10"), W("11")}));
    CHECK(point->block_count() == 1);
    std::vector<Potential> pots{Potential::constant(point, 1.3), Potential::constant(point, 1.3)};
    const PotentialFamily cfam(ThetaGrid({0.0, 1.0}), std::move(pots));
    const DirectLoss closs(cfam);
    CHECK(std::abs(closs.eval(0, W("0"))) < 1e-12);
  }
  SUBCASE("window context is required") {
    const std::vector<Symbol> y{0, 1, 0};
    CHECK(loss.path_sum(0, y, 3) ==
          doctest::Approx(-2 * std::log(0.7) - std::log(0.3)).epsilon(1e-12));
    CHECK_THROWS_AS(loss.path_sum(0, y, 4), LengthMismatch);
  }
}

TEST_CASE("bayes posterior from direct observations") {
  const ThetaGrid grid(decade_grid());
  const PotentialFamily fam = bernoulli_family(grid);

  SUBCASE("single-block posterior is proportional to prior times stationary mass") {
    const std::vector<Symbol> y{1};
    const PosteriorGrid pg = bayes_posterior_direct(fam, y, 1);
    double norm = 0.0;
    for (std::size_t i = 0; i < fam.size(); ++i) norm += grid.prior(i) * grid.point(i);
    for (std::size_t i = 0; i < fam.size(); ++i) {
      CHECK(pg.masses[i] == doctest::Approx(grid.prior(i) * grid.point(i) / norm).epsilon(1e-12));
    }
  }
  SUBCASE("Bernoulli conjugate shape") {
    const GibbsModel truth = fam.model(*grid.index_of(0.3));
    const Trajectory y = sample_trajectory(truth, 200, 11);
    int k = 0;
    for (Symbol s : y.symbols) k += s;
    const PosteriorGrid pg = bayes_posterior_direct(fam, y.symbols, 200);
    // check against theta^k (1-theta)^(n-k) shape through ratios
    for (std::size_t i = 1; i < fam.size(); ++i) {
      const double expect = k * (std::log(grid.point(i)) - std::log(grid.point(0))) +
                            (200 - k) * (std::log(1 - grid.point(i)) - std::log(1 - grid.point(0)));
      CHECK(pg.log_weights[i] - pg.log_weights[0] == doctest::Approx(expect).epsilon(1e-9));
    }
  }
  SUBCASE("a cylinder every model nulls is rejected") {
    const auto gm = golden_mean();
    std::vector<Potential> pots{Potential::zero(gm), Potential::constant(gm, 0.2)};
    const PotentialFamily gmfam(ThetaGrid({0.0, 1.0}), std::move(pots));
    const std::vector<Symbol> bad{1, 1, 0};
    CHECK_THROWS_AS(bayes_posterior_direct(gmfam, bad, 3), InadmissibleObservation);
  }
}

TEST_CASE("K^2 sandwich between Gibbs and Bayes posteriors") {
  SUBCASE("product family: K = 1 and the posteriors coincide") {
    PotentialFamily fam = bernoulli_family(ThetaGrid(decade_grid()));
    double K = 1.0;
    for (std::size_t i = 0; i < fam.size(); ++i) {
      K = std::max(K, gibbs_constant_audit(fam.model(i), 6).K);
    }
    const Trajectory y = sample_trajectory(fam.model(2), 500, 77);
    for (std::size_t n : {1u, 10u, 100u, 500u}) {
      const PosteriorGrid gibbs = gibbs_posterior_direct(fam, y.symbols, n);
      const PosteriorGrid bayes = bayes_posterior_direct(fam, y.symbols, n);
      const SandwichResult sw = k2_sandwich_check(gibbs, bayes, K);
      CHECK(sw.holds);
    }
  }
  SUBCASE("golden-mean affine family: K > 1, sandwich still tight") {
    const auto gm = golden_mean();
    CounterRng rng(1234);
    const Potential f_a = oracle::random_potential(gm, 2, rng, 0.6);
    const Potential f_b = oracle::random_potential(gm, 2, rng, 0.6);
    PotentialFamily fam = markov_family(ThetaGrid({0.0, 0.25, 0.5, 0.75, 1.0}), f_a, f_b);
    double K = 1.0;
    for (std::size_t i = 0; i < fam.size(); ++i) {
      K = std::max(K, gibbs_constant_audit(fam.model(i), 8).K);
    }
    CHECK(K > 1.0);
    const Trajectory y = sample_trajectory(fam.model(1), 400 + 1, 31);
    for (std::size_t n : {2u, 40u, 400u}) {
      const SandwichResult sw = k2_sandwich_check(gibbs_posterior_direct(fam, y.symbols, n),
                                                  bayes_posterior_direct(fam, y.symbols, n), K);
      CHECK(sw.holds);
    }
  }
}

TEST_CASE("direct posterior concentrates at the generating parameter") {
  const PotentialFamily fam = bernoulli_family(ThetaGrid(decade_grid()));
  const std::size_t star = *fam.grid().index_of(0.3);
  const Trajectory y = sample_trajectory(fam.model(star), 2000, 271828);
  const PosteriorGrid pg = gibbsfit::gibbs_posterior_direct(fam, y.symbols, 2000);
  CHECK(pg.mode() == star);
  CHECK(pg.masses[star] > 0.95);
  CHECK(rate_consistency_check(pg));
}

TEST_CASE("posterior mode is invariant under beta on the same observations") {
  const PotentialFamily fam = bernoulli_family(ThetaGrid(decade_grid()));
  const std::size_t star = *fam.grid().index_of(0.7);
  const Trajectory y = sample_trajectory(fam.model(star), 3000, 5150);
  std::size_t mode = fam.size();
  for (double beta : {0.5, 1.0, 2.0}) {
    const PosteriorGrid pg = gibbs_posterior_direct(fam, y.symbols, 3000, beta);
    if (mode == fam.size()) mode = pg.mode();
    CHECK(pg.mode() == mode);
  }
  CHECK(mode == star);
}

TEST_CASE("hidden posterior") {
  const ThetaGrid grid(decade_grid());
  const PotentialFamily fam = bernoulli_family(grid);
  Eigen::MatrixXd means(9, 2), stds(9, 2);
  for (int i = 0; i < 9; ++i) {
    means(i, 0) = 0.0;
    means(i, 1) = grid.point(static_cast<std::size_t>(i));
    stds(i, 0) = stds(i, 1) = 0.5;
  }
  const LossSpec spec = LossSpec::gaussian(means, stds);

  SUBCASE("single emission weight reduction") {
    const std::vector<double> u{0.4};
    const PosteriorGrid pg = bayes_posterior_hidden(fam, spec, u);
    for (std::size_t i = 0; i < fam.size(); ++i) {
      const auto& mu = fam.model(i).measure();
      const double expect =
          std::log(mu.stationary()[0] * std::exp(spec.log_density(i, 0, 0.4)) +
                   mu.stationary()[1] * std::exp(spec.log_density(i, 1, 0.4)));
      CHECK(pg.log_weights[i] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  SUBCASE("concentration on the identifiability class at n = 5000") {
    const std::size_t star = *grid.index_of(0.3);
    const Trajectory hidden = sample_trajectory(fam.model(star), 5000, 90210);
    const EmissionSequence em = emit(hidden, spec, star, 90210, 0.3);
    const PosteriorGrid pg = bayes_posterior_hidden(fam, spec, em.values);
    CHECK(pg.masses[star] >= 0.95);
  }
  SUBCASE("identical observation-map rows produce bitwise-equal weights") {
    // grid with a duplicated law: point 1.3 copies 0.3's table and emissions
    std::vector<double> pts = decade_grid();
    pts.push_back(1.3);
    const auto sft = full_shift();
    std::vector<Potential> pots;
    Eigen::MatrixXd m2(10, 2), s2(10, 2);
    for (std::size_t i = 0; i < 10; ++i) {
      const double theta = i < 9 ? pts[i] : 0.3;
      pots.emplace_back(sft, 1, std::unordered_map<std::string, double>{
                                    {"0", std::log(1 - theta)}, {"1", std::log(theta)}});
      m2(static_cast<Eigen::Index>(i), 0) = 0.0;
      m2(static_cast<Eigen::Index>(i), 1) = theta;
      s2(static_cast<Eigen::Index>(i), 0) = s2(static_cast<Eigen::Index>(i), 1) = 0.5;
    }
    const PotentialFamily dup(ThetaGrid(pts), std::move(pots));
    const LossSpec dspec = LossSpec::gaussian(m2, s2);
    const std::size_t star = 2;  // 0.3
    const Trajectory hidden = sample_trajectory(dup.model(star), 800, 5);
    const EmissionSequence em = emit(hidden, dspec, star, 5, 0.3);
    const PosteriorGrid pg = bayes_posterior_hidden(dup, dspec, em.values);
    CHECK(pg.log_weights[9] == pg.log_weights[2]);
    CHECK(pg.masses[9] / pg.masses[2] ==
          doctest::Approx(dup.grid().prior(9) / dup.grid().prior(2)).epsilon(1e-12));
  }
}

TEST_CASE("closed-form direct rates") {
  const PotentialFamily fam = bernoulli_family(ThetaGrid(decade_grid()));
  const std::size_t i03 = *fam.grid().index_of(0.3);
  const std::size_t i05 = *fam.grid().index_of(0.5);

  CHECK(rate_closed_form_direct(fam, i05, i05) ==
        doctest::Approx(2 * std::log(2.0)).epsilon(1e-12));
  CHECK(rate_closed_form_direct(fam, i03, i03) ==
        doctest::Approx(2 * binary_entropy(0.3)).epsilon(1e-12));
  CHECK(rate_closed_form_direct(fam, i03, i03) == doctest::Approx(1.221729).epsilon(1e-5));
  CHECK(rate_closed_form_direct(fam, i05, i03) ==
        doctest::Approx(1.386294).epsilon(1e-5));

  SUBCASE("excess over the minimum is twice the divergence rate") {
    const double gap =
        rate_closed_form_direct(fam, i05, i03) - rate_closed_form_direct(fam, i03, i03);
    const double expect = 2.0 * divergence_rate(fam.model(i03).measure(), fam.model(i05));
    CHECK(gap == doctest::Approx(expect).epsilon(1e-10));
    CHECK(gap == doctest::Approx(0.164566).epsilon(1e-4));
  }
}

TEST_CASE("rate estimates") {
  SUBCASE("identically zero rates have zero mean and stderr") {
    const std::vector<std::uint64_t> seeds{1, 2, 3, 4};
    const RateEstimate est = rate_estimate([](std::uint64_t) { return 0.0; }, seeds);
    CHECK(est.mean == 0.0);
    CHECK(est.std_error == 0.0);
  }
  SUBCASE("direct-case estimates match the closed form") {
    const PotentialFamily fam = bernoulli_family(ThetaGrid(decade_grid()));
    const std::size_t star = *fam.grid().index_of(0.3);
    std::vector<std::uint64_t> seeds;
    CounterRng master(616);
    for (int r = 0; r < 6; ++r) seeds.push_back(master.next_u64());
    for (std::size_t i : {star, *fam.grid().index_of(0.5), *fam.grid().index_of(0.8)}) {
      const RateEstimate est = rate_estimate_direct(fam, i, star, 5000, seeds);
      const double v = rate_closed_form_direct(fam, i, star);
      CHECK(std::abs(est.mean - v) <= 3 * est.std_error + 2e-3);
    }
  }
  SUBCASE("direct-case estimates on a family with K > 1 carry a log(K)/n bias at most") {
    const auto gm = golden_mean();
    CounterRng prng(88);
    PotentialFamily fam = markov_family(ThetaGrid({0.0, 0.5, 1.0}),
                                        oracle::random_potential(gm, 2, prng, 0.5),
                                        oracle::random_potential(gm, 2, prng, 0.5));
    double K = 1.0;
    for (std::size_t i = 0; i < fam.size(); ++i) {
      K = std::max(K, gibbs_constant_audit(fam.model(i), 8).K);
    }
    CHECK(K > 1.0);
    const std::size_t star = 1, n = 4000;
    std::vector<std::uint64_t> seeds{21, 22, 23, 24, 25, 26};
    for (std::size_t i = 0; i < fam.size(); ++i) {
      const RateEstimate est = rate_estimate_direct(fam, i, star, n, seeds);
      const double v = rate_closed_form_direct(fam, i, star);
      CHECK(std::abs(est.mean - v) <=
            3 * est.std_error + 2.0 * std::log(K) / static_cast<double>(n) + 1e-3);
    }
  }
  SUBCASE("hidden rates match the quadrature cross-entropy of the emission mixture") {
    // an i.i.d. Bernoulli hidden chain on the full shift makes the emissions
    // i.i.d. mixtures, so the likelihood rate has a one-dimensional integral
    // form computable by Simpson quadrature
    const PotentialFamily fam = bernoulli_family(ThetaGrid({0.3, 0.5, 0.7}));
    Eigen::MatrixXd means(3, 2), stds(3, 2);
    for (int i = 0; i < 3; ++i) {
      means(i, 0) = 0.0;
      means(i, 1) = fam.grid().point(static_cast<std::size_t>(i));
      stds(i, 0) = stds(i, 1) = 0.5;
    }
    const LossSpec spec = LossSpec::gaussian(means, stds);
    const std::size_t star = 0;
    auto mixture = [&](std::size_t i, double u) {
      const double theta = fam.grid().point(i);
      return (1.0 - theta) * std::exp(spec.log_density(i, 0, u)) +
             theta * std::exp(spec.log_density(i, 1, u));
    };
    std::vector<std::uint64_t> seeds{101, 102, 103, 104, 105, 106};
    for (std::size_t i = 0; i < 3; ++i) {
      double quad = 0.0;
      const double lo = -8.0, hi = 9.0;
      const int steps = 20000;
      const double h = (hi - lo) / steps;
      for (int k = 0; k <= steps; ++k) {
        const double u = lo + k * h;
        const double w = (k == 0 || k == steps) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        quad += w * mixture(star, u) * std::log(mixture(i, u));
      }
      const double expected_rate = -quad * h / 3.0;
      const RateEstimate est = rate_estimate_hidden(fam, spec, i, star, 4000, seeds);
      CHECK(std::abs(est.mean - expected_rate) <= 3 * est.std_error + 1e-3);
    }
  }
  SUBCASE("nearly uninformative emissions flatten the hidden rate") {
    const PotentialFamily fam = bernoulli_family(ThetaGrid({0.2, 0.5, 0.8}));
    std::vector<std::uint64_t> seeds{11, 12, 13};
    auto spread_at = [&](double s) {
      Eigen::MatrixXd means(3, 2), stds(3, 2);
      for (int i = 0; i < 3; ++i) {
        means(i, 0) = 0.0;
        means(i, 1) = fam.grid().point(static_cast<std::size_t>(i));
        stds(i, 0) = stds(i, 1) = s;
      }
      const LossSpec spec = LossSpec::gaussian(means, stds);
      double lo = 1e300, hi = -1e300;
      for (std::size_t i = 0; i < 3; ++i) {
        const RateEstimate est = rate_estimate_hidden(fam, spec, i, 1, 2000, seeds);
        lo = std::min(lo, est.mean);
        hi = std::max(hi, est.mean);
      }
      return hi - lo;
    };
    CHECK(spread_at(4.0) < spread_at(2.0));
  }
}

TEST_CASE("posterior masses are normalized for every n and beta") {
  const PotentialFamily fam = bernoulli_family(ThetaGrid(decade_grid()));
  const Trajectory y = sample_trajectory(fam.model(3), 600, 404);
  for (double beta : {0.0, 0.5, 1.0, 3.0}) {
    for (std::size_t n : {1u, 60u, 600u}) {
      const PosteriorGrid pg = gibbs_posterior_direct(fam, y.symbols, n, beta);
      double total = 0.0;
      for (double m : pg.masses) total += m;
      CHECK(std::abs(total - 1.0) <= 1e-10);
      CHECK(std::isfinite(pg.log_Z));
      CHECK(rate_consistency_check(pg));
    }
  }
}

TEST_CASE("threaded posterior evaluation is bitwise-deterministic") {
  const PotentialFamily fam = bernoulli_family(ThetaGrid(decade_grid()));
  Eigen::MatrixXd means(9, 2), stds(9, 2);
  for (int i = 0; i < 9; ++i) {
    means(i, 0) = 0.0;
    means(i, 1) = 0.1 * (i + 1);
    stds(i, 0) = stds(i, 1) = 0.5;
  }
  const LossSpec spec = LossSpec::gaussian(means, stds);
  const Trajectory hidden = sample_trajectory(fam.model(2), 2000, 21);
  const EmissionSequence em = emit(hidden, spec, 2, 21, 0.3);
  const std::vector<Observation> obs = to_observations(std::span<const double>(em.values));
  const PosteriorGrid serial = gibbs_posterior(fam, spec, obs, 1.0, 1);
  const PosteriorGrid parallel = gibbs_posterior(fam, spec, obs, 1.0, 4);
  CHECK(serial.log_weights == parallel.log_weights);
  CHECK(serial.masses == parallel.masses);
}

TEST_CASE("theta_min selection") {
  RateTable rates;
  rates.theta = {0.1, 0.2, 0.3};
  SUBCASE("unique minimizer") {
    rates.v_hat = {1.0, 0.5, 0.9};
    rates.std_error = {0.0, 0.0, 0.0};
    CHECK(theta_min(rates) == std::vector<std::size_t>{1});
  }
  SUBCASE("constant table returns the whole grid") {
    rates.v_hat = {0.7, 0.7, 0.7};
    rates.std_error = {0.0, 0.0, 0.0};
    CHECK(theta_min(rates).size() == 3);
  }
  SUBCASE("stderr widens the tie tolerance") {
    rates.v_hat = {0.70, 0.71, 0.9};
    rates.std_error = {0.01, 0.01, 0.01};
    CHECK(theta_min(rates) == std::vector<std::size_t>{0, 1});
  }
}

TEST_CASE("concentration report") {
  const PotentialFamily fam = bernoulli_family(ThetaGrid(decade_grid()));
  const std::size_t star = *fam.grid().index_of(0.3);
  const Trajectory y = sample_trajectory(fam.model(star), 4000, 99);
  std::vector<PosteriorGrid> per_n;
  for (std::size_t n : {100u, 1000u, 4000u}) {
    per_n.push_back(gibbs_posterior_direct(fam, y.symbols, n));
  }
  SUBCASE("whole-grid target has zero outside mass") {
    std::vector<std::size_t> all;
    for (std::size_t i = 0; i < fam.size(); ++i) all.push_back(i);
    for (const auto& row : concentration_report(per_n, all, 0.0)) {
      CHECK(row.outside_mass == 0.0);
    }
  }
  SUBCASE("outside mass decays and the bite rate flattens") {
    const std::vector<std::size_t> target{star};
    const auto rows = concentration_report(per_n, target, 0.05);
    CHECK(rows.back().outside_mass < rows.front().outside_mass + 1e-12);
    CHECK(rows.back().outside_mass < 0.05);
    CHECK(std::abs(rows.back().target_mass_rate) < 0.05);
  }
}
