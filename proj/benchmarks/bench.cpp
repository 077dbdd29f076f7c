#include <benchmark/benchmark.h>

#include "cubeval/arith.hpp"
#include "cubeval/grid.hpp"
#include "cubeval/localdata.hpp"
#include "cubeval/type_one.hpp"

namespace {

const cubeval::BinaryCubicForm kF{1, 0, 0, 2};

void BM_Sieve(benchmark::State& state) {
  const auto x = static_cast<uint64_t>(state.range(0));
  cubeval::grid::SieveOptions opt;
  opt.threads = 1;
  for (auto _ : state) {
    auto g = cubeval::grid::sieve(kF, {x}, opt);
    benchmark::DoNotOptimize(g.cells().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(x * x));
}
BENCHMARK(BM_Sieve)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_Factor(benchmark::State& state) {
  const cubeval::u128 n = cubeval::u128{1000000007} * 998244353 * 1000003;
  for (auto _ : state) benchmark::DoNotOptimize(cubeval::arith::factor(n));
}
BENCHMARK(BM_Factor);

void BM_GammaRange(benchmark::State& state) {
  const auto dmax = static_cast<uint64_t>(state.range(0));
  for (auto _ : state) {
    cubeval::u128 total = 0;
    for (uint64_t d = 1; d <= dmax; ++d) total += cubeval::local::gamma_F(kF, d).gamma;
    benchmark::DoNotOptimize(total);
  }
}
BENCHMARK(BM_GammaRange)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_TypeOne(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(cubeval::typeone::type_one_aggregate(kF, 1024, 2048, 1));
  }
}
BENCHMARK(BM_TypeOne)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
