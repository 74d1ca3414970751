#include <random>

#include <benchmark/benchmark.h>

#include <hierprox/prox.hpp>

using namespace hierprox;

namespace {

RealVec random_vec(int n, std::uint64_t seed, double scale = 2.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, scale);
  RealVec v(n);
  for (int i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

void BM_SoftThreshold(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const L1Norm f(n);
  const RealVec x = random_vec(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(f.prox(0.7, x));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SoftThreshold)->Arg(16)->Arg(1024);

void BM_HingeProx(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const HingeSum f(n);
  const RealVec x = random_vec(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(f.prox(0.7, x));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_HingeProx)->Arg(16)->Arg(1024);

void BM_BallProjection(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const IndicatorBall f(n, 1.0);
  const RealVec x = random_vec(n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(f.prox(1.0, x));
}
BENCHMARK(BM_BallProjection)->Arg(16)->Arg(1024);

// Root solve on the Newton path; q is passed as tenths.
void BM_PerspectiveProx(benchmark::State& state) {
  const double q = static_cast<double>(state.range(0)) / 10.0;
  const int n = static_cast<int>(state.range(1));
  const PerspectiveQ params(q, 0.5);
  const RealVec y = random_vec(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(prox_perspective(params, 0.3, y));
}
BENCHMARK(BM_PerspectiveProx)->Args({15, 30})->Args({20, 30})->Args({30, 30})->Args({20, 1000});

}  // namespace
