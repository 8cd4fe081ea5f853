#include <benchmark/benchmark.h>

#include "vdbtherm/rates.hpp"
#include "vdbtherm/spectral.hpp"

using namespace vdbtherm;

namespace {

const Model& model() {
  static const Model m{SystemSpec{}};
  return m;
}

void BM_TransitionRate(benchmark::State& state) {
  const double beta = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(transition_rate(Level::minus, Level::plus, beta, model()));
}
BENCHMARK(BM_TransitionRate)->Arg(1)->Arg(10)->Arg(1000);

void BM_ComputeRates(benchmark::State& state) {
  const double beta = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(compute_rates(beta, model()));
}
BENCHMARK(BM_ComputeRates)->Arg(1)->Arg(10)->Arg(1000);

void BM_ClassifyRegime(benchmark::State& state) {
  const auto M = build_rate_matrix(compute_rates(0.1, model()));
  for (auto _ : state) benchmark::DoNotOptimize(classify_regime(M));
}
BENCHMARK(BM_ClassifyRegime);

void BM_FindTEP(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(find_T_EP(model(), {0.5, 50.0}));
}
BENCHMARK(BM_FindTEP)->Unit(benchmark::kMillisecond);

}  // namespace
