#include "qg/gauss_map.hpp"
#include "qg/generators.hpp"
#include "qg/legendre.hpp"
#include "qg/loop_tools.hpp"

#include <benchmark/benchmark.h>

namespace {

qg::LegendreGrid ellipsoid_lift(int n) { return qg::lie_lift(qg::gen::ellipsoid(1, 1.3, 1.7, n, n)); }

void BM_ConformalGauss(benchmark::State& state) {
  const auto f = ellipsoid_lift(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(qg::conformal_gauss(f));
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_ConformalGauss)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oN);

void BM_Tension(benchmark::State& state) {
  const auto S = qg::conformal_gauss(ellipsoid_lift(int(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(qg::tension(S));
}
BENCHMARK(BM_Tension)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Frame(benchmark::State& state) {
  const auto S = qg::conformal_gauss(ellipsoid_lift(int(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(qg::frame(S));
}
BENCHMARK(BM_Frame)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Flatness(benchmark::State& state) {
  const auto a = qg::maurer_cartan(qg::frame(qg::conformal_gauss(ellipsoid_lift(int(state.range(0))))));
  const auto a2 = qg::spectral_connection(a, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(qg::flatness_residual(a2));
}
BENCHMARK(BM_Flatness)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
