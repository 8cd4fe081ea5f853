#include <random>

#include <benchmark/benchmark.h>

#include "vdbtherm/dynamics.hpp"

using namespace vdbtherm;

namespace {

RateMatrix random_generator(int n) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(0.1, 2.0);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = i == j ? 0.0 : d(rng);
  return RateMatrix::from_offdiagonal(a);
}

void BM_Decompose(benchmark::State& state) {
  const auto M = random_generator(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(decompose(M));
}
BENCHMARK(BM_Decompose)->Arg(3)->Arg(6);

void BM_SpectralExp(benchmark::State& state) {
  const auto d = decompose(random_generator(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(d.exp(1.7));
}
BENCHMARK(BM_SpectralExp)->Arg(3)->Arg(6);

void BM_ExpOracle(benchmark::State& state) {
  const auto M = random_generator(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(exp_oracle(M.m, 1.7));
}
BENCHMARK(BM_ExpOracle)->Arg(3)->Arg(6);

void BM_Propagate(benchmark::State& state) {
  const auto M = random_generator(3);
  std::vector<double> times(400);
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = 0.01 * static_cast<double>(i);
  const Eigen::Vector3d p0(0.893, 0.04, 0.067);
  for (auto _ : state) benchmark::DoNotOptimize(propagate(M, p0, times));
}
BENCHMARK(BM_Propagate);

}  // namespace
