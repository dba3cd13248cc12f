#include <benchmark/benchmark.h>

#include <vector>

#include "fairbayes/fair_threshold.hpp"
#include "fairbayes/gaussian_oracle.hpp"
#include "fairbayes/score_models.hpp"
#include "fairbayes/synthetic_gen.hpp"

using namespace fairbayes;

namespace {

GroupedScores fitted_scores(const GaussianPopulation& pop, std::size_t n) {
  const Dataset data = sample(pop, n, 7);
  TrainingConfig cfg;
  cfg.epochs = 100;
  return GroupedScores::from_model(fit_logistic(data, cfg), data);
}

void BM_SolveDp(benchmark::State& state) {
  const GroupedScores gs = fitted_scores(draw_population(SynthSpec::binary_default(1)),
                                         static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_dp(gs, 0.05));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SolveDp)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_SolveEoRandomized(benchmark::State& state) {
  const GroupedScores gs = fitted_scores(draw_population(SynthSpec::binary_default(1)), 20000);
  for (auto _ : state) benchmark::DoNotOptimize(solve_eo(gs, 0.02, true));
}
BENCHMARK(BM_SolveEoRandomized)->Unit(benchmark::kMillisecond);

void BM_SolveMulticlass(benchmark::State& state) {
  const int groups = static_cast<int>(state.range(0));
  const GaussianPopulation pop = draw_population(SynthSpec::multiclass_default(groups));
  const Dataset data = sample(pop, 10000 * static_cast<std::size_t>(groups), 7);
  TrainingConfig cfg;
  cfg.epochs = 100;
  cfg.group_mode = GroupMode::per_group;
  const GroupedScores gs = GroupedScores::from_model(fit_logistic(data, cfg), data);
  for (auto _ : state) benchmark::DoNotOptimize(solve_multiclass_dp(gs));
}
BENCHMARK(BM_SolveMulticlass)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_FitLogistic(benchmark::State& state) {
  const Dataset data = sample(draw_population(SynthSpec::binary_default(1)), 20000, 3);
  TrainingConfig cfg;
  cfg.epochs = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fit_logistic(data, cfg));
}
BENCHMARK(BM_FitLogistic)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_TailRate(benchmark::State& state) {
  const GaussianPopulation pop = draw_population(SynthSpec::binary_default(1));
  double q = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tail_rate(pop, 1, q, Stratum::positive));
    q = q < 0.9 ? q + 1e-3 : 0.1;
  }
}
BENCHMARK(BM_TailRate);

void BM_OracleRule(benchmark::State& state) {
  const GaussianPopulation pop = draw_population(SynthSpec::binary_default(1));
  for (auto _ : state) benchmark::DoNotOptimize(oracle_rule(pop, Measure::DP, 0.05));
}
BENCHMARK(BM_OracleRule)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
