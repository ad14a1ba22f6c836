#pragma once

// Power-utility wealth allocation between two assets whose prices follow
// geometric Brownian motions in business time tau_s.

#include <cstdint>

#include "tcc/clock.hpp"
#include "tcc/simulation.hpp"

namespace tcc {

struct PortfolioSpec {
  double mu1 = 0.0;
  double sigma1 = 1.0;
  double mu2 = 0.0;
  double sigma2 = 1.0;
  double eta = 0.5;  ///< utility exponent in (0, 1)
  double S = 1.0;

  void validate() const;
};

/// q(u) = eta (eta - 1) ((u sigma1)^2 + ((1 - u) sigma2)^2) / 2 + eta (u mu1 + (1 - u) mu2),
/// the exponent rate of E[X^eta] per unit plant time under the constant allocation u.
double allocation_objective(const PortfolioSpec& spec, double u);

struct Allocation {
  double u_star = 0.0;
  double rho_star = 0.0;
};

/// Unique maximiser of the strictly concave q and its maximum.
Allocation optimal_allocation(const PortfolioSpec& spec);

/// exp(beta(rho*) (S - s)) x^eta. Throws DomainError when rho* >= r_max.
double value_function(const PortfolioSpec& spec, const SubordinatorModel& model, double s, double x);

/// Monte Carlo estimate of E[X_S^eta] under the constant allocation u, using
/// exact log-normal wealth given the clock increment.
MCSummary simulate_terminal_utility(const PortfolioSpec& spec, const SubordinatorModel& model, double u, double x0,
                                    std::size_t n_paths, std::uint64_t seed, unsigned threads = 0);

/// simulate_terminal_utility at u = u*.
MCSummary validate_portfolio(const PortfolioSpec& spec, const SubordinatorModel& model, double x0,
                             std::size_t n_paths, std::uint64_t seed, unsigned threads = 0);

}  // namespace tcc
