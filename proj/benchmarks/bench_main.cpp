#include <benchmark/benchmark.h>

#include "phonon/capacity.hpp"
#include "phonon/lattice.hpp"
#include "phonon/operator.hpp"
#include "phonon/specfun.hpp"
#include "phonon/spectra.hpp"

using namespace phonon;

static void BM_BesselSequences(benchmark::State& state) {
  const double x = static_cast<double>(state.range(0)) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(specfun::cyl_table(8, x));
}
BENCHMARK(BM_BesselSequences)->Arg(1)->Arg(20)->Arg(300);

static void BM_LatticeTable(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lattice::lattice_sum_table(order, 1.7, {1.1, 0.4}));
}
BENCHMARK(BM_LatticeTable)->Arg(6)->Arg(14)->Arg(18);

static void BM_Assemble(benchmark::State& state) {
  const op::MaterialParams mat{5000, 5000, 1, 1};
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(op::assemble_characteristic_matrix(0.2, mat, points::M, {0.05}, N));
}
BENCHMARK(BM_Assemble)->Arg(3)->Arg(7);

static void BM_Indicators(benchmark::State& state) {
  const auto A = op::assemble_characteristic_matrix(0.2, {5000, 5000, 1, 1}, points::M, {0.05}, 7).entries;
  if (state.range(0))
    for (auto _ : state) benchmark::DoNotOptimize(spectra::singular_value_indicator(A));
  else
    for (auto _ : state) benchmark::DoNotOptimize(spectra::gram_indicator(A));
}
BENCHMARK(BM_Indicators)->Arg(0)->Arg(1);

static void BM_QuasiStaticCapacity(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(capacity::capacity_quasi(points::M, 0.05, 4));
}
BENCHMARK(BM_QuasiStaticCapacity)->Unit(benchmark::kMillisecond);

static void BM_PointSolve(benchmark::State& state) {
  const op::MaterialParams mat{5000, 5000, 1, 1};
  for (auto _ : state) {
    spectra::PointSolver ps(points::X, mat, {0.05}, 7, 6.0);
    benchmark::DoNotOptimize(ps.roots(2));
  }
}
BENCHMARK(BM_PointSolve)->Unit(benchmark::kMillisecond)->Iterations(3);
BENCHMARK_MAIN();
