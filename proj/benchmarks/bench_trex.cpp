#include <benchmark/benchmark.h>

#include <hierprox/trex.hpp>

using namespace hierprox;

namespace {

TrexSpec synth_spec(int N, int p) {
  TrexSpec s;
  s.data = synth_generate(N, p, 20.0, 1).data;
  return s;
}

void BM_TrexSubproblem(benchmark::State& state) {
  const TrexSpec s = synth_spec(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  TrexRunConfig cfg;
  cfg.max_iter = 1000;
  cfg.record_trace = false;
  for (auto _ : state) benchmark::DoNotOptimize(trex_subproblem(s, 0, cfg));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_TrexSubproblem)->Args({30, 20})->Args({20, 30})->Unit(benchmark::kMillisecond);

void BM_HtrexSubproblem(benchmark::State& state) {
  const TrexSpec s = synth_spec(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const SmoothPtr psi = smooth_diff_psi(s.p());
  TrexRunConfig cfg;
  cfg.max_iter = 1000;
  cfg.record_trace = false;
  for (auto _ : state) benchmark::DoNotOptimize(htrex_subproblem(s, 0, psi, cfg));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_HtrexSubproblem)->Args({30, 20})->Args({20, 30})->Unit(benchmark::kMillisecond);

void BM_TrexSolveSerial(benchmark::State& state) {
  const TrexSpec s = synth_spec(30, 20);
  TrexRunConfig cfg;
  cfg.max_iter = 500;
  cfg.record_trace = false;
  cfg.parallel = false;
  for (auto _ : state) benchmark::DoNotOptimize(trex_solve(s, cfg));
}
BENCHMARK(BM_TrexSolveSerial)->Unit(benchmark::kMillisecond);

}  // namespace
