#include <benchmark/benchmark.h>

#include <bearing_forms/pe.hpp>
#include <bearing_forms/scenario.hpp>
#include <bearing_forms/sim.hpp>

using namespace bearing_forms;

namespace {

void BM_BearingLaplacian(benchmark::State& state) {
  const Scenario cube = scenario_cube8_3d();
  const Configuration config = cube.trajectory->positions(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bearing_laplacian(cube.graph, config));
  }
}
BENCHMARK(BM_BearingLaplacian);

void BM_TrajectoryEval(benchmark::State& state) {
  const Scenario cube = scenario_cube8_3d();
  double t = 0.0;
  for (auto _ : state) {
    t += 1e-3;
    benchmark::DoNotOptimize(cube.trajectory->positions(t));
  }
}
BENCHMARK(BM_TrajectoryEval);

void BM_SimulateSingleSecond(benchmark::State& state) {
  const Scenario cube = scenario_cube8_3d();
  const InitialState init = resolve_initial_state(cube);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        simulate_single(cube.graph, *cube.trajectory, init.positions, 1.0, 1e-3, 1.0));
  }
}
BENCHMARK(BM_SimulateSingleSecond)->Unit(benchmark::kMillisecond);

void BM_LaplacianCertificate(benchmark::State& state) {
  const Scenario square = scenario_square4_2d();
  const PEOptions options = pe_options(square);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        certify_bearing_laplacian_pe(square.graph, *square.trajectory, options));
  }
}
BENCHMARK(BM_LaplacianCertificate)->Unit(benchmark::kMillisecond);

void BM_DissipationConstant(benchmark::State& state) {
  const Scenario square = scenario_square4_2d();
  for (auto _ : state) {
    benchmark::DoNotOptimize(min_dissipation_constant(square.graph, 8.0, 11.0));
  }
}
BENCHMARK(BM_DissipationConstant);

}  // namespace

BENCHMARK_MAIN();
