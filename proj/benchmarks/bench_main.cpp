#include <random>

#include <benchmark/benchmark.h>

#include "birgn/noise.hpp"
#include "birgn/presets.hpp"
#include "birgn/subproblem.hpp"
#include "birgn/tridiagonal.hpp"

using namespace birgn;

namespace {

void BM_Thomas(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> lo(n, -1.0), di(n, 2.5), up(n, -1.0), rhs(n, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_tridiagonal(lo, di, up, rhs));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Thomas)->RangeMultiplier(4)->Range(64, 65536)->Complexity(benchmark::oN);

void BM_ForwardApply(benchmark::State& state, const char* preset) {
  const Problem p = make_preset(preset);
  for (auto _ : state) benchmark::DoNotOptimize(p.op->apply(p.truth));
}
BENCHMARK_CAPTURE(BM_ForwardApply, reaction1d, "reaction1d-paper");
BENCHMARK_CAPTURE(BM_ForwardApply, reaction2d, "reaction2d-paper")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ForwardApply, diffusion1d, "diffusion1d-paper");

void BM_TangentAdjoint(benchmark::State& state, const char* preset) {
  const Problem p = make_preset(preset);
  const auto lin = p.op->linearize(p.truth);
  const Field h(p.truth.grid(), 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(lin->adjoint(lin->tangent(h)));
}
BENCHMARK_CAPTURE(BM_TangentAdjoint, reaction1d, "reaction1d-paper");
BENCHMARK_CAPTURE(BM_TangentAdjoint, reaction2d, "reaction2d-paper");
BENCHMARK_CAPTURE(BM_TangentAdjoint, diffusion1d, "diffusion1d-paper");

void BM_Minimize(benchmark::State& state) {
  const auto kind = static_cast<PenaltyKind>(state.range(0));
  const Problem p = make_preset("reaction1d-paper");
  const Field y = add_noise(p.op->apply(p.truth), 1e-4, 1);
  const auto lin = p.op->linearize(p.initial_guess);
  const PenaltyFunctional pen(PenaltyFunctional::Options{kind, 0.01, 1e-6, 2.0}, p.initial_guess);
  const SubproblemSpec spec{*lin, y, pen, 1e-3};
  int iterations = 0;
  for (auto _ : state) iterations = minimize(spec).inner_iterations;
  state.counters["inner_iterations"] = iterations;
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_Minimize)
    ->Arg(static_cast<int>(PenaltyKind::SquaredL2))
    ->Arg(static_cast<int>(PenaltyKind::ElasticNetSmoothed))
    ->Arg(static_cast<int>(PenaltyKind::TVSmoothed))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
