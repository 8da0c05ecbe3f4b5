#include <benchmark/benchmark.h>

#include <random>

#include "fsplay/integrator.hpp"
#include "fsplay/linalg2.hpp"
#include "fsplay/oscillator.hpp"
#include "fsplay/patched.hpp"
#include "fsplay/play.hpp"

using namespace fsplay;

static void BM_PlayEvaluate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> step(0.0, 0.05);
  std::vector<double> y(n);
  for (std::size_t i = 1; i < n; ++i) y[i] = y[i - 1] + step(rng);
  const SampledPath input(uniform_grid(0.0, 1.0, n), y);
  const auto curves = BoundaryCurvePair::unit_slope();
  for (auto _ : state) benchmark::DoNotOptimize(play_evaluate(input, 0.0, curves));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PlayEvaluate)->Range(1 << 10, 1 << 18);

static void BM_IntegrateOscillator(benchmark::State& state) {
  const OscillatorParams p;
  const auto sys = make_system(p);
  const double eps = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate(sys, eps, {2.5, -0.5}, 0.0, 5.0, IntegratorConfig::sweep()));
  }
}
BENCHMARK(BM_IntegrateOscillator)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_IntegrateImplicit(benchmark::State& state) {
  const auto sys = make_system(OscillatorParams{});
  IntegratorConfig cfg = IntegratorConfig::sweep();
  cfg.method = Method::ImplicitTrapezoid;
  for (auto _ : state) benchmark::DoNotOptimize(integrate(sys, 0.01, {2.5, -0.5}, 0.0, 5.0, cfg));
}
BENCHMARK(BM_IntegrateImplicit)->Unit(benchmark::kMillisecond);

static void BM_PhiMatrix(benchmark::State& state) {
  const Mat2 A{-100.0, 100.0, -1.0, 0.2};
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(phi_matrix(k, A));
}
BENCHMARK(BM_PhiMatrix)->DenseRange(0, 2);

static void BM_AffineFlow(benchmark::State& state) {
  const Mat2 A{-100.0, 100.0, -1.0, 0.2};
  double s = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(affine_flow(A, {1.0, 0.5}, {0.0, 2.0}, {2.5, -0.5}, s));
    s += 1e-9;
  }
}
BENCHMARK(BM_AffineFlow);

static void BM_PatchedBuild(benchmark::State& state) {
  const auto sys = make_system(OscillatorParams{});
  PatchOptions o;
  o.enforce_admissibility = false;
  o.box = CompactBox{{-3, 3}, {-3, 3}};
  const double eps = 0.4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_patched_solution(sys, eps, {2.5, -0.5}, 0.25, 5e-3, 2.0, o));
  }
}
BENCHMARK(BM_PatchedBuild)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
