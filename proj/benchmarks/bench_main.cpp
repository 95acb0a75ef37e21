#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "adaptobs/drem.hpp"
#include "adaptobs/example_system.hpp"
#include "adaptobs/filters.hpp"
#include "adaptobs/hetero.hpp"
#include "adaptobs/matrix.hpp"
#include "adaptobs/pipeline.hpp"

using namespace adaptobs;

namespace {

Matrix random_matrix(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(n, n);
  for (double& v : m.data()) v = u(rng);
  return m;
}

void BM_Determinant(benchmark::State& state) {
  const Matrix m = random_matrix(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(determinant(m));
}
BENCHMARK(BM_Determinant)->DenseRange(2, 6);

void BM_Adjugate(benchmark::State& state) {
  const Matrix m = random_matrix(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(adjugate(m));
}
BENCHMARK(BM_Adjugate)->DenseRange(2, 6);

void BM_Cascade(benchmark::State& state) {
  const ExampleConfig cfg;
  const CascadeBundle b = example_bundle(cfg);
  const Vector y = scaled(example_eta(cfg.theta, cfg.rho), 0.37);
  for (auto _ : state) benchmark::DoNotOptimize(run_cascade(y, 0.37, b));
}
BENCHMARK(BM_Cascade);

void BM_FilterStep(benchmark::State& state) {
  const ExampleConfig cfg;
  const FilterGains g = make_filter_gains(cfg.k, cfg.f);
  FilterState fs = FilterState::zeros(3);
  double t = 0.0;
  for (auto _ : state) {
    step_filters(fs, g, std::sin(t), std::cos(t), 1e-3, t);
    t += 1e-3;
  }
  benchmark::DoNotOptimize(fs.data.data());
}
BENCHMARK(BM_FilterStep);

// 26 simulated seconds with both observers, one second past t_eps.
void BM_Pipeline26s(benchmark::State& state) {
  Scenario s;
  s.params.t_end = 26.0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(s));
}
BENCHMARK(BM_Pipeline26s)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
