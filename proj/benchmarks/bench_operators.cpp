#include <limits>
#include <random>

#include <benchmark/benchmark.h>

#include <hierprox/splitting.hpp>
#include <hierprox/trex.hpp>

using namespace hierprox;

namespace {

RealVec random_vec(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  RealVec v(n);
  for (int i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

TrexSpec synth_spec(int N, int p) {
  TrexSpec s;
  s.data = synth_generate(N, p, 20.0, 1).data;
  return s;
}

// f = l1 on R^p, one term per row of a random matrix with hinge loss.
SplitProblem hinge_rows(int rows, int p) {
  std::vector<SplitTerm> terms;
  for (int i = 0; i < rows; ++i)
    terms.push_back({std::make_shared<HingeSum>(1), LinearMap::row(random_vec(p, 100 + i))});
  return SplitProblem(std::make_shared<L1Norm>(p), std::move(terms));
}

void BM_DrsProductI_Trex(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0)), p = static_cast<int>(state.range(1));
  const SplitProblem sp = synth_spec(N, p).subproblem(0);
  const auto t = drs_product_I(sp);
  const RealVec z = random_vec(t->dim(), 5);
  for (auto _ : state) benchmark::DoNotOptimize(t->apply(z));
}
BENCHMARK(BM_DrsProductI_Trex)->Args({30, 20})->Args({20, 30})->Args({200, 100});

void BM_DrsProductII_Hinge(benchmark::State& state) {
  const int rows = static_cast<int>(state.range(0));
  const auto t = drs_product_II(hinge_rows(rows, 3));
  const RealVec z = random_vec(t->dim(), 6);
  for (auto _ : state) benchmark::DoNotOptimize(t->apply(z));
}
BENCHMARK(BM_DrsProductII_Hinge)->Arg(100)->Arg(1000);

void BM_Lal_Hinge(benchmark::State& state) {
  const int rows = static_cast<int>(state.range(0));
  const auto t = lal_operator(hinge_rows(rows, 3));
  const RealVec z = random_vec(t->dim(), 7);
  for (auto _ : state) benchmark::DoNotOptimize(t->apply(z));
}
BENCHMARK(BM_Lal_Hinge)->Arg(100)->Arg(1000);

void BM_GramSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RealMat m(n, n + 5);
  for (int j = 0; j < m.cols(); ++j) m.col(j) = random_vec(n, 200 + j);
  const GramSolver g(LinearMap::from_matrix(m));
  const RealVec v = random_vec(n, 8);
  for (auto _ : state) benchmark::DoNotOptimize(g.solve(v));
}
BENCHMARK(BM_GramSolve)->Arg(31)->Arg(201);

}  // namespace
