#include <benchmark/benchmark.h>

#include "cpm/e_model.hpp"
#include "cpm/fock.hpp"
#include "cpm/sd_model.hpp"
#include "cpm/superops.hpp"
#include "cpm/trajectories.hpp"

namespace {

cpm::DetectorParams bench_params() {
  cpm::DetectorParams p;
  p.eta = 0.6;
  p.dark = 5e-3;
  return p;
}

void BM_ApplyExpA(benchmark::State& state) {
  const cpm::DiagonalFockState s =
      cpm::make_state(cpm::StateKind::coherent(static_cast<double>(state.range(0))));
  for (auto _ : state) {
    benchmark::DoNotOptimize(cpm::apply_exp_a(s, 0.4));
  }
}
BENCHMARK(BM_ApplyExpA)->Arg(20)->Arg(50)->Arg(100);

void BM_SdCountDistribution(benchmark::State& state) {
  const cpm::DiagonalFockState s =
      cpm::make_state(cpm::StateKind::thermal(static_cast<double>(state.range(0))));
  const cpm::DetectorParams p = bench_params();
  for (auto _ : state) {
    benchmark::DoNotOptimize(cpm::sd::count_distribution(s, p, 1.0));
  }
}
BENCHMARK(BM_SdCountDistribution)->Arg(10)->Arg(50);

void BM_ECountDistribution(benchmark::State& state) {
  const cpm::DiagonalFockState s =
      cpm::make_state(cpm::StateKind::thermal(static_cast<double>(state.range(0))));
  const cpm::DetectorParams p = bench_params();
  for (auto _ : state) {
    benchmark::DoNotOptimize(cpm::emodel::count_distribution(s, p, 50.0));
  }
}
BENCHMARK(BM_ECountDistribution)->Arg(10)->Arg(50);

void BM_EMeanCounts(benchmark::State& state) {
  const cpm::DiagonalFockState s =
      cpm::make_state(cpm::StateKind::thermal(static_cast<double>(state.range(0))));
  const cpm::DetectorParams p = bench_params();
  double t = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cpm::emodel::mean_counts(s, p, t));
    t += 1e-9;  // defeat value caching across iterations
  }
}
BENCHMARK(BM_EMeanCounts)->Arg(50)->Arg(100);

void BM_EWaitingCurve(benchmark::State& state) {
  const cpm::DiagonalFockState s =
      cpm::make_state(cpm::StateKind::number(static_cast<int>(state.range(0))));
  const cpm::DetectorParams p = bench_params();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cpm::emodel::waiting_curve(s, p, 1.0, cpm::emodel::default_waiting_window(p)));
  }
}
BENCHMARK(BM_EWaitingCurve)->Arg(50)->Arg(100);

void BM_TrajectoryEnsemble(benchmark::State& state) {
  const cpm::DiagonalFockState s = cpm::make_state(cpm::StateKind::coherent(50.0));
  const cpm::DetectorParams p = bench_params();
  const std::vector<double> grid = {1.0, 2.0, 3.0, 4.0, 5.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(cpm::traj::estimate_count_moments(
        s, p, cpm::traj::Model::sd, grid, state.range(0), 7, 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrajectoryEnsemble)->Arg(2000)->Arg(20000);

}  // namespace

BENCHMARK_MAIN();
