#include <benchmark/benchmark.h>

#include "chaos_ns/coupling.hpp"
#include "chaos_ns/mc_solver.hpp"
#include "chaos_ns/propagator.hpp"
#include "chaos_ns/spectral_ops.hpp"

using namespace chaos_ns;

namespace {

constexpr double kC0 = 0.9038041657947025;

void BM_Convect(benchmark::State& state) {
  const Grid g(static_cast<int>(state.range(0)));
  const SpectralField u = random_divfree_field(g, 1.5, 1), v = random_divfree_field(g, 1.5, 2);
  for (auto _ : state) benchmark::DoNotOptimize(convect(u, v));
}
BENCHMARK(BM_Convect)->Arg(32)->Arg(64)->Arg(128)->Arg(256);

void BM_LerayProject(benchmark::State& state) {
  const Grid g(static_cast<int>(state.range(0)));
  SpectralField f = random_divfree_field(g, 1.5, 3);
  f += random_gradient_field(g, 1.5, 4);
  for (auto _ : state) benchmark::DoNotOptimize(leray_project(f));
}
BENCHMARK(BM_LerayProject)->Arg(64)->Arg(256);

void BM_CouplingTable(benchmark::State& state) {
  const IndexSet set = enumerate_indices(static_cast<int>(state.range(0)), 2, 8);
  for (auto _ : state) benchmark::DoNotOptimize(build_coupling_table(set));
  state.counters["indices"] = static_cast<double>(set.size());
}
BENCHMARK(BM_CouplingTable)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_KernelEvaluate(benchmark::State& state) {
  const Grid g(32);
  NoiseModel noise = NoiseModel::kraichnan(g, {kC0, 1.0, 1});
  const int nw = noise.noise_modes();
  PropagatorConfig c;
  c.horizon = 0.1;
  const PropagatorSystem sys(enumerate_indices(static_cast<int>(state.range(0)), 2, nw), std::move(noise), c);
  ChaosState st = initial_state(taylor_green(g), sys);
  for (std::size_t a = 1; a < st.coeffs.size(); ++a) st.coeffs[a] = random_divfree_field(g, 2.0, a, 10);
  std::vector<SpectralField> out;
  for (auto _ : state) {
    sys.kernel().evaluate(st.coeffs, 0.05, out, 1);
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["indices"] = static_cast<double>(st.coeffs.size());
}
BENCHMARK(BM_KernelEvaluate)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_PropagatorStep(benchmark::State& state) {
  const Grid g(32);
  NoiseModel noise = NoiseModel::kraichnan(g, {kC0, 1.0, 1});
  const int nw = noise.noise_modes();
  PropagatorConfig c;
  c.horizon = 1e6;
  const PropagatorSystem sys(enumerate_indices(static_cast<int>(state.range(0)), 2, nw), std::move(noise), c);
  ChaosState st = initial_state(taylor_green(g), sys);
  for (auto _ : state) {
    st.t = 0.0;
    benchmark::DoNotOptimize(step(sys, st));
  }
}
BENCHMARK(BM_PropagatorStep)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_McStep(benchmark::State& state) {
  const Grid g(static_cast<int>(state.range(0)));
  McConfig c(NoiseModel::kraichnan(g, {kC0, 1.0, 1}));
  c.dt = 1e-3;
  c.horizon = 1.0;
  const McSolver solver(c);
  SpectralField u = taylor_green(g);
  const std::vector<double> dw(static_cast<std::size_t>(c.noise.noise_modes()), 0.03);
  for (auto _ : state) {
    SpectralField v = u;
    benchmark::DoNotOptimize(solver.step_path(v, 0.0, dw));
  }
}
BENCHMARK(BM_McStep)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
