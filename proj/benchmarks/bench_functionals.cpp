#include <benchmark/benchmark.h>
#include "fhslab/functionals.hpp"
#include "fhslab/kernel_table.hpp"

using namespace fhslab;

static void BM_SeminormEnergy(benchmark::State& state) {
  const Grid grid(1e-3, 1e4, static_cast<int>(state.range(0)));
  const auto pp = make_params(1, 2.0, 0.4, 0.0);
  const auto U = candidate_extremal(pp, grid);
  for (auto _ : state)
    benchmark::DoNotOptimize(gagliardo_energy(U, pp.N, pp.s, pp.p));
}
BENCHMARK(BM_SeminormEnergy)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_EnergyGradient(benchmark::State& state) {
  const Grid grid(1e-3, 1e4, static_cast<int>(state.range(0)));
  const auto pp = make_params(1, 2.0, 0.4, 0.0);
  const auto U = candidate_extremal(pp, grid);
  for (auto _ : state)
    benchmark::DoNotOptimize(gagliardo_energy_gradient(U, pp.N, pp.s, pp.p));
}
BENCHMARK(BM_EnergyGradient)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_KernelTableBuild(benchmark::State& state) {
  const Grid grid(1e-3, 1e4, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    KernelTable table(3, 1.0, grid);
    benchmark::DoNotOptimize(table.entry(1, 2));
  }
}
BENCHMARK(BM_KernelTableBuild)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
