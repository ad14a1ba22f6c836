#include <benchmark/benchmark.h>

#include <random>

#include "tcc/lqr.hpp"
#include "tcc/matrix.hpp"

namespace {

tcc::Matrix random_stable(tcc::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  tcc::Matrix a(n, n);
  for (tcc::Index i = 0; i < n; ++i)
    for (tcc::Index j = 0; j < n; ++j) a(i, j) = 0.3 * nd(rng) / std::sqrt(static_cast<double>(n));
  return a - 0.5 * tcc::Matrix::Identity(n, n);
}

void BM_MatExp(benchmark::State& state) {
  const auto a = random_stable(state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(tcc::mat_exp(a));
}
BENCHMARK(BM_MatExp)->Arg(2)->Arg(8)->Arg(32);

void BM_MatLog(benchmark::State& state) {
  const auto e = tcc::mat_exp(random_stable(state.range(0), 2));
  for (auto _ : state) benchmark::DoNotOptimize(tcc::mat_log(e));
}
BENCHMARK(BM_MatLog)->Arg(2)->Arg(8)->Arg(32);

void BM_BetaMatrix(benchmark::State& state) {
  const auto a = random_stable(state.range(0), 3);
  const auto ig = tcc::SubordinatorModel::inverse_gaussian(2.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(tcc::beta_matrix(ig, a));
}
BENCHMARK(BM_BetaMatrix)->Arg(2)->Arg(8)->Arg(32);

// Building the mapping tables for an n-state plant works on 2n^2 x 2n^2 matrices.
void BM_MappingSetup(benchmark::State& state) {
  const auto n = state.range(0);
  const tcc::LinearPlant plant{random_stable(n, 4), tcc::Matrix::Identity(n, 1), tcc::Matrix::Zero(n, 1)};
  const auto ig = tcc::SubordinatorModel::inverse_gaussian(2.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(tcc::TimeChangedMappings(ig, plant));
}
BENCHMARK(BM_MappingSetup)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
