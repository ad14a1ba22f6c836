#include <benchmark/benchmark.h>

#include "tcc/lqr.hpp"

namespace {

struct Example {
  tcc::LinearPlant plant;
  tcc::QuadraticCost cost;
  Example() {
    tcc::Matrix a(2, 2), b(2, 1), phi(2, 2);
    a << 0.75, 1.0, 0.0, 0.75;
    b << 0.0, 1.0;
    phi << 1.0, 0.0, 0.0, 0.0;
    plant = {a, b, tcc::Matrix::Zero(2, 1)};
    cost = {tcc::Matrix::Zero(2, 2), tcc::Matrix::Constant(1, 1, 0.5), phi, 1.0};
  }
};

void BM_SolveRiccati(benchmark::State& state) {
  const Example ex;
  const tcc::TimeChangedMappings maps(tcc::SubordinatorModel::inverse_gaussian(2.0, 2.0), ex.plant);
  const auto steps = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tcc::solve_riccati(maps, ex.plant, ex.cost, steps));
}
BENCHMARK(BM_SolveRiccati)->Arg(250)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_ClassicalLqr(benchmark::State& state) {
  const Example ex;
  for (auto _ : state) benchmark::DoNotOptimize(tcc::classical_lqr(ex.plant, ex.cost, 1000));
}
BENCHMARK(BM_ClassicalLqr)->Unit(benchmark::kMillisecond);

void BM_PolicyCost(benchmark::State& state) {
  const Example ex;
  const tcc::TimeChangedMappings maps(tcc::SubordinatorModel::inverse_gaussian(2.0, 2.0), ex.plant);
  const auto naive = tcc::classical_lqr(ex.plant, ex.cost, 1000);
  for (auto _ : state) benchmark::DoNotOptimize(tcc::policy_cost(maps, ex.plant, ex.cost, naive, 1000));
}
BENCHMARK(BM_PolicyCost)->Unit(benchmark::kMillisecond);

}  // namespace
