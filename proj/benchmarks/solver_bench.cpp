#include <benchmark/benchmark.h>

#include "obstacle/grid_vi.hpp"
#include "obstacle/radial_solver.hpp"
#include "obstacle/serrin_overdet.hpp"
#include "obstacle/two_phase.hpp"

using namespace obstacle;

namespace {

const Obstacle kCap = Obstacle::cap(2, 1.0, 8.0);

// Argument: grid resolution 1/h.
void BM_PsorBall(benchmark::State& state) {
  const auto grid = assemble(DomainSpec::ball(1.0), 1.0 / static_cast<double>(state.range(0)));
  const GridProblem problem = make_problem(grid, kCap);
  long sweeps = 0;
  for (auto _ : state) {
    const GridSolution sol = psor_solve(problem);
    sweeps = sol.log.sweeps;
    benchmark::DoNotOptimize(sol.u.data());
  }
  state.counters["unknowns"] = static_cast<double>(grid->interior_count());
  state.counters["sweeps"] = static_cast<double>(sweeps);
}
BENCHMARK(BM_PsorBall)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_PenaltyBall(benchmark::State& state) {
  const GridProblem problem = make_problem(assemble(DomainSpec::ball(1.0), 1.0 / 64.0), kCap);
  const double eps = 0.1 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(penalty_solve(problem, eps).u.data());
}
BENCHMARK(BM_PenaltyBall)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_GridAssembly(benchmark::State& state) {
  const DomainSpec d = DomainSpec::perturbed_ball(1.0, 0.1, 4);
  const double h = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(assemble(d, h));
}
BENCHMARK(BM_GridAssembly)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_StabilityReportEllipse(benchmark::State& state) {
  const DomainSpec d = DomainSpec::ellipse(1.0, 1.3);
  const GridSolution sol = solve_one_phase_grid(d, kCap, 1.0 / 64.0);
  for (auto _ : state) benchmark::DoNotOptimize(stability_report(d, kCap, sol, {}).eps);
}
BENCHMARK(BM_StabilityReportEllipse)->Unit(benchmark::kMillisecond);

void BM_RadialOnePhase(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(solve_radial_one_phase(kCap, 1.0).contact_radius);
}
BENCHMARK(BM_RadialOnePhase);

void BM_RadialTwoPhase(benchmark::State& state) {
  const Obstacle psi = Obstacle::cap(3, 1.0, 4.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_radial_two_phase(psi, 1.0, 2.0, 2.0, 1.0).interface_value);
  }
}
BENCHMARK(BM_RadialTwoPhase);

void BM_MovingPlaneScan(benchmark::State& state) {
  const TwoPhaseSolution sol = solve_two_phase_grid(
      Conductivity(DomainSpec::shifted_ball(1.0, {0.2, 0.0}), 2.0, 1.0), 2.0,
      Obstacle::cap(2, 1.0, 4.0), 1.0 / 64.0);
  for (auto _ : state) benchmark::DoNotOptimize(moving_plane_scan(sol, {1.0, 0.0}, 1.0 / 64.0).lambda_star);
}
BENCHMARK(BM_MovingPlaneScan)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
