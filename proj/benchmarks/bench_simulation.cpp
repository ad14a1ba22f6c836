#include <benchmark/benchmark.h>

#include "tcc/simulation.hpp"

namespace {

struct Setup {
  tcc::LinearPlant plant;
  tcc::QuadraticCost cost;
  tcc::GainSchedule gains;
  tcc::Vector x0{2};
  Setup() {
    tcc::Matrix a(2, 2), b(2, 1), m(2, 1), phi(2, 2);
    a << 0.75, 1.0, 0.0, 0.75;
    b << 0.0, 1.0;
    m << 0.1, 0.2;
    phi << 1.0, 0.0, 0.0, 0.0;
    plant = {a, b, m};
    cost = {tcc::Matrix::Zero(2, 2), tcc::Matrix::Constant(1, 1, 0.5), phi, 1.0};
    gains = tcc::classical_lqr(plant, cost, 1000);
    x0 << 0.0, 1.0;
  }
};

void BM_SampleIncrement(benchmark::State& state) {
  const auto ig = tcc::SubordinatorModel::inverse_gaussian(2.0, 2.0);
  const auto gamma = tcc::SubordinatorModel::gamma(1.0, 1.0);
  const auto& model = state.range(0) == 0 ? ig : gamma;
  tcc::Engine rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(tcc::sample_increment(model, 0.01, rng));
}
BENCHMARK(BM_SampleIncrement)->Arg(0)->Arg(1);

void BM_Trajectory(benchmark::State& state) {
  const Setup s;
  const auto ig = tcc::SubordinatorModel::inverse_gaussian(2.0, 2.0);
  tcc::SimConfig cfg;
  std::size_t path = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        tcc::simulate_trajectory(ig, s.plant, s.cost, s.gains, s.x0, cfg, tcc::path_seeds(0, path++)));
  }
}
BENCHMARK(BM_Trajectory)->Unit(benchmark::kMicrosecond);

void BM_EstimateCost(benchmark::State& state) {
  const Setup s;
  const auto ig = tcc::SubordinatorModel::inverse_gaussian(2.0, 2.0);
  tcc::SimConfig cfg;
  cfg.n_paths = 1000;
  cfg.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tcc::estimate_cost(ig, s.plant, s.cost, s.gains, s.x0, cfg));
}
BENCHMARK(BM_EstimateCost)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
