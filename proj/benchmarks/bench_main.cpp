#include <benchmark/benchmark.h>

#include "rankone/joinings.hpp"
#include "rankone/statistics.hpp"
#include "rankone/transform.hpp"

using namespace rankone;

static void BM_BuildStage(benchmark::State& state) {
  const int j = static_cast<int>(state.range(0));
  for (auto _ : state) {
    Construction c(ConstructionSpec::staircase(2));
    benchmark::DoNotOptimize(c.stage(j)->height);
  }
  state.SetLabel("staircase h1=2");
}
BENCHMARK(BM_BuildStage)->DenseRange(6, 9)->Unit(benchmark::kMillisecond);

static void BM_ReturnProfile(benchmark::State& state) {
  Construction c(ConstructionSpec::staircase(2));
  const int j = static_cast<int>(state.range(0));
  c.occurrences(j, j + 5);
  for (auto _ : state) benchmark::DoNotOptimize(return_profile(c, j, j + 5, c.height(j + 3)).values.size());
}
BENCHMARK(BM_ReturnProfile)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

static void BM_PowerImage(benchmark::State& state) {
  Construction c(ConstructionSpec::chacon(1));
  const auto base = c.stage(3)->levels(std::vector<std::int64_t>{0, 2, 5, 7});
  const int J = static_cast<int>(state.range(0));
  c.stage(J);
  for (auto _ : state) benchmark::DoNotOptimize(power_image(c, base, 37, J).image.size());
}
BENCHMARK(BM_PowerImage)->DenseRange(4, 8, 2)->Unit(benchmark::kMicrosecond);

static void BM_EmpiricalJoining(benchmark::State& state) {
  Construction a(ConstructionSpec::staircase(2)), b(ConstructionSpec::staircase(3));
  a.stage(9);
  b.stage(9);
  const std::int64_t n = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(empirical_joining(a, b, {0, 0}, n, 3, 3).residual);
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_EmpiricalJoining)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
