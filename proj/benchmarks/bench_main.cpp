#include <benchmark/benchmark.h>

#include <cmath>

#include "gibbsfit/posterior.hpp"
#include "gibbsfit/rng.hpp"
#include "gibbsfit/simulate.hpp"
#include "gibbsfit/thermo.hpp"

using namespace gibbsfit;

namespace {

SftPtr golden_mean() {
  return std::make_shared<const Sft>(Sft::build(2, {word_from_string("11")}));
}

SftPtr four_symbol_order2() {
  // 4-symbol shift with a handful of forbidden 2-words, re-blocked to order 3
  std::vector<Word> forbidden{word_from_string("33"), word_from_string("30"),
                              word_from_string("02")};
  return std::make_shared<const Sft>(Sft::build(4, std::move(forbidden), 2));
}

Potential random_potential(SftPtr sft, int range, std::uint64_t seed) {
  CounterRng rng(seed);
  std::unordered_map<std::string, double> table;
  for (const Word& w : sft->words(range)) {
    table.emplace(word_to_string(w), rng.uniform() - 0.5);
  }
  return Potential(std::move(sft), range, std::move(table));
}

void BM_SolveGibbsSmall(benchmark::State& state) {
  const Potential f = random_potential(golden_mean(), 2, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(GibbsModel::solve(f).pressure());
  }
}
BENCHMARK(BM_SolveGibbsSmall);

void BM_SolveGibbsWide(benchmark::State& state) {
  const Potential f = random_potential(four_symbol_order2(), 3, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(GibbsModel::solve(f).pressure());
  }
}
BENCHMARK(BM_SolveGibbsWide);

void BM_ForwardRecursion(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const PotentialFamily fam = bernoulli_family(ThetaGrid({0.3}));
  Eigen::MatrixXd means(1, 2), stds(1, 2);
  means << 0.0, 0.3;
  stds << 0.5, 0.5;
  const LossSpec spec = LossSpec::gaussian(means, stds);
  const Trajectory hidden = sample_trajectory(fam.model(0), n, 7);
  const EmissionSequence em = emit(hidden, spec, 0, 7, 0.3);
  const std::vector<Observation> obs = to_observations(std::span<const double>(em.values));
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_partition_theta(fam.model(0), spec, 0, obs));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(BM_ForwardRecursion)->Arg(1000)->Arg(10000);

void BM_WordEnumeration(benchmark::State& state) {
  const auto sft = golden_mean();
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) {
    std::size_t count = 0;
    sft->for_each_word(m, [&](WordView) { ++count; });
    benchmark::DoNotOptimize(count);
  }
}
BENCHMARK(BM_WordEnumeration)->Arg(14)->Arg(20);

void BM_SampleTrajectory(benchmark::State& state) {
  const GibbsModel model = solve_gibbs(Potential::zero(golden_mean()));
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_trajectory(model, n, ++seed).symbols.size());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SampleTrajectory)->Arg(100000);

void BM_GibbsAudit(benchmark::State& state) {
  GibbsModel model = solve_gibbs(Potential::zero(golden_mean()));
  const int depth = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gibbs_constant_audit(model, depth).K);
  }
}
BENCHMARK(BM_GibbsAudit)->Arg(10)->Arg(14);

}  // namespace

BENCHMARK_MAIN();
