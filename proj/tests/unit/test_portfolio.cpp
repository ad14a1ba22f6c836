#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tcc/error.hpp"
#include "tcc/portfolio.hpp"

using namespace tcc;

namespace {

PortfolioSpec reference_spec() { return {0.1, 0.3, 0.05, 0.2, 0.5, 1.0}; }

// Brute-force maximiser of the allocation objective on a uniform grid.
double grid_argmax(const PortfolioSpec& spec, double lo, double hi, double step) {
  double best_u = lo, best_q = allocation_objective(spec, lo);
  const auto n = static_cast<long>(std::llround((hi - lo) / step));
  for (long i = 1; i <= n; ++i) {
    const double u = lo + i * step;
    const double q = allocation_objective(spec, u);
    if (q > best_q) best_q = q, best_u = u;
  }
  return best_u;
}

}  // namespace

TEST(Allocation, Symmetry) {
  const PortfolioSpec spec{0.07, 0.25, 0.07, 0.25, 0.4, 1.0};
  EXPECT_NEAR(optimal_allocation(spec).u_star, 0.5, 1e-15);
}

TEST(Allocation, LowVarianceAssetTakesEverything) {
  const PortfolioSpec spec{0.05, 0.01, 0.05, 1.0, 0.5, 1.0};
  EXPECT_NEAR(optimal_allocation(spec).u_star, 1.0, 0.02);
}

TEST(Allocation, MatchesGridSearch) {
  std::mt19937_64 rng(50);
  std::uniform_real_distribution<double> mu(-0.05, 0.15), sigma(0.15, 0.5), eta(0.1, 0.9);
  int checked = 0;
  while (checked < 10) {
    const PortfolioSpec spec{mu(rng), sigma(rng), mu(rng), sigma(rng), eta(rng), 1.0};
    const auto alloc = optimal_allocation(spec);
    if (!(alloc.u_star > -1.9 && alloc.u_star < 2.9)) continue;  // keep the maximiser inside the search box
    const double u_grid = grid_argmax(spec, -2.0, 3.0, 1e-5);
    EXPECT_NEAR(alloc.u_star, u_grid, 1e-4);
    EXPECT_DOUBLE_EQ(alloc.rho_star, allocation_objective(spec, alloc.u_star));
    for (double u = -2.0; u <= 3.0; u += 0.01) EXPECT_GE(alloc.rho_star, allocation_objective(spec, u));
    ++checked;
  }
}

TEST(Allocation, InvariantUnderCommonDriftShift) {
  const auto base = reference_spec();
  for (double c : {-0.3, 0.01, 2.0}) {
    auto shifted = base;
    shifted.mu1 += c;
    shifted.mu2 += c;
    EXPECT_NEAR(optimal_allocation(shifted).u_star, optimal_allocation(base).u_star, 1e-12);
  }
}

TEST(Allocation, RejectsInvalidSpec) {
  PortfolioSpec bad{0.1, -0.3, 0.05, 0.0, 1.5, 0.0};
  try {
    optimal_allocation(bad);
    FAIL();
  } catch (const ContractError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("eta"), std::string::npos);
    EXPECT_NE(what.find("sigma1"), std::string::npos);
    EXPECT_NE(what.find("sigma2"), std::string::npos);
    EXPECT_NE(what.find("S"), std::string::npos);
  }
}

TEST(ValueFunction, BoundaryAndClassicalCases) {
  const auto spec = reference_spec();
  const auto ig = SubordinatorModel::inverse_gaussian(2.0, 2.0);
  EXPECT_DOUBLE_EQ(value_function(spec, ig, spec.S, 4.0), 2.0);
  EXPECT_EQ(value_function(spec, ig, 0.3, 0.0), 0.0);
  const double rho = optimal_allocation(spec).rho_star;
  const auto det = SubordinatorModel::deterministic(1.0);
  EXPECT_NEAR(value_function(spec, det, 0.25, 3.0), std::exp(rho * 0.75) * std::sqrt(3.0), 1e-14);
  EXPECT_THROW(value_function(spec, ig, -0.1, 1.0), ContractError);
  EXPECT_THROW(value_function(spec, ig, 0.1, -1.0), ContractError);
}

TEST(ValueFunction, DomainFailure) {
  // Large drift pushes rho* past r_max = 0.05 of a Gamma clock.
  const PortfolioSpec spec{0.5, 0.3, 0.4, 0.2, 0.5, 1.0};
  EXPECT_THROW(value_function(spec, SubordinatorModel::gamma(1.0, 0.05), 0.0, 1.0), DomainError);
}

TEST(ValueFunction, LogSlopeIsMinusBeta) {
  const auto spec = reference_spec();
  for (const auto& model : {SubordinatorModel::inverse_gaussian(2.0, 2.0), SubordinatorModel::gamma(2.0, 3.0),
                            SubordinatorModel::poisson(1.0)}) {
    const double beta = beta_real(model, optimal_allocation(spec).rho_star);
    for (double s : {0.0, 0.4, 0.9}) {
      const double h = 1e-3;
      // log V is affine in s, so the central difference is exact up to rounding.
      const double slope =
          (std::log(value_function(spec, model, s + h, 2.0)) - std::log(value_function(spec, model, s, 2.0))) / h;
      EXPECT_NEAR(slope, -beta, 1e-12 / h) << model.family();
    }
  }
}

TEST(MonteCarlo, MatchesClosedFormValue) {
  const auto spec = reference_spec();
  for (const auto& model : {SubordinatorModel::inverse_gaussian(2.0, 2.0), SubordinatorModel::deterministic(1.0)}) {
    const auto mc = validate_portfolio(spec, model, 1.5, 100000, 17);
    const double want = value_function(spec, model, 0.0, 1.5);
    EXPECT_LE(std::abs(mc.mean - want), 4.0 * mc.std_error) << model.family();
  }
}

TEST(MonteCarlo, PerturbedAllocationsDoNotWin) {
  const auto spec = reference_spec();
  const auto ig = SubordinatorModel::inverse_gaussian(2.0, 2.0);
  const double u = optimal_allocation(spec).u_star;
  const auto best = simulate_terminal_utility(spec, ig, u, 1.0, 100000, 5);
  for (double d : {-0.1, 0.1}) {
    const auto alt = simulate_terminal_utility(spec, ig, u + d, 1.0, 100000, 5);
    const double joint = std::hypot(best.std_error, alt.std_error);
    EXPECT_LE(alt.mean, best.mean + 4.0 * joint);
  }
}

TEST(MonteCarlo, ThreadCountDoesNotChangeResult) {
  const auto spec = reference_spec();
  const auto ig = SubordinatorModel::inverse_gaussian(2.0, 2.0);
  const auto a = validate_portfolio(spec, ig, 1.0, 1000, 3, 1);
  const auto b = validate_portfolio(spec, ig, 1.0, 1000, 3, 3);
  EXPECT_EQ(a.samples, b.samples);
}
