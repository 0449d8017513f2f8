#include <benchmark/benchmark.h>

#include "bpre/conditional_walk.hpp"
#include "bpre/geiger.hpp"
#include "bpre/prob_kernel.hpp"
#include "bpre/rng.hpp"

using namespace bpre;

static void BM_WalkTail(benchmark::State& state) {
  const auto m = state.range(0);
  std::int64_t y = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(walk_tail(m, y));
    y = (y + 7) % 64;
  }
}
BENCHMARK(BM_WalkTail)->Arg(100)->Arg(10000)->Arg(1000000);

static void BM_StayNegative(benchmark::State& state) {
  const auto m = state.range(0);
  std::int64_t x = -1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(stay_negative_prob(m, x));
    x = x <= -40 ? -1 : x - 1;
  }
}
BENCHMARK(BM_StayNegative)->Arg(100)->Arg(100000);

static void BM_ConditionedWalk(benchmark::State& state) {
  RngStream rng(1, 0);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_conditioned_min_at_end(n, rng));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ConditionedWalk)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_NegativeBinomial(benchmark::State& state) {
  RngStream rng(2, 0);
  const auto size = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_negative_binomial(size, 0.4, rng));
}
BENCHMARK(BM_NegativeBinomial)->Arg(1)->Arg(16)->Arg(17)->Arg(1000)->Arg(1 << 30);

static void BM_ConditionedBpre(benchmark::State& state) {
  RngStream rng(3, 0);
  const auto n = static_cast<std::size_t>(state.range(0));
  const WalkPath path = sample_conditioned_min_at_end(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(sample_conditioned_bpre(path, rng));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ConditionedBpre)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
