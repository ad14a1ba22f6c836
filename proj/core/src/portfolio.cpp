#include "tcc/portfolio.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "parallel.hpp"
#include "tcc/error.hpp"

namespace tcc {

void PortfolioSpec::validate() const {
  std::vector<std::string> problems;
  if (!(eta > 0.0 && eta < 1.0)) problems.emplace_back("eta must lie in (0, 1)");
  if (!(sigma1 > 0.0) || !std::isfinite(sigma1)) problems.emplace_back("sigma1 must be finite and > 0");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) problems.emplace_back("sigma2 must be finite and > 0");
  if (!std::isfinite(mu1) || !std::isfinite(mu2)) problems.emplace_back("mu1 and mu2 must be finite");
  if (!(S > 0.0) || !std::isfinite(S)) problems.emplace_back("horizon S must be finite and > 0");
  if (!problems.empty()) {
    std::ostringstream os;
    os << "invalid portfolio spec:";
    for (const auto& p : problems) os << "\n  - " << p;
    throw ContractError(os.str());
  }
}

double allocation_objective(const PortfolioSpec& spec, double u) {
  const double a = u * spec.sigma1;
  const double b = (1.0 - u) * spec.sigma2;
  return 0.5 * spec.eta * (spec.eta - 1.0) * (a * a + b * b) + spec.eta * (u * spec.mu1 + (1.0 - u) * spec.mu2);
}

Allocation optimal_allocation(const PortfolioSpec& spec) {
  spec.validate();
  const double s1 = spec.sigma1 * spec.sigma1;
  const double s2 = spec.sigma2 * spec.sigma2;
  const double u = (s2 + (spec.mu1 - spec.mu2) / (1.0 - spec.eta)) / (s1 + s2);
  return {u, allocation_objective(spec, u)};
}

double value_function(const PortfolioSpec& spec, const SubordinatorModel& model, double s, double x) {
  if (!(x >= 0.0)) throw ContractError("wealth x must be >= 0");
  if (!(s >= 0.0 && s <= spec.S)) throw ContractError("s must lie in [0, S]");
  const auto alloc = optimal_allocation(spec);
  const double rmax = r_max(model);
  if (!(alloc.rho_star < rmax)) {
    std::ostringstream os;
    os << "rho* = " << alloc.rho_star << " lies outside dom(beta) (r_max = " << rmax << ")";
    throw DomainError(os.str());
  }
  return std::exp(beta_real(model, alloc.rho_star) * (spec.S - s)) * std::pow(x, spec.eta);
}

MCSummary simulate_terminal_utility(const PortfolioSpec& spec, const SubordinatorModel& model, double u, double x0,
                                    std::size_t n_paths, std::uint64_t seed, unsigned threads) {
  spec.validate();
  if (!(x0 >= 0.0)) throw ContractError("initial wealth must be >= 0");
  if (n_paths < 1) throw ContractError("n_paths must be >= 1");
  const double drift = u * spec.mu1 + (1.0 - u) * spec.mu2;
  const double a = u * spec.sigma1;
  const double b = (1.0 - u) * spec.sigma2;
  const double var = a * a + b * b;
  const double x0_eta = std::pow(x0, spec.eta);

  std::vector<double> utilities(n_paths);
  detail::parallel_for(n_paths, threads, [&](std::size_t i) {
    const auto seeds = path_seeds(seed, i);
    Engine clock_rng(seeds.clock);
    Engine diffusion_rng(seeds.diffusion);
    // A constant allocation makes log-wealth Gaussian given the total plant time.
    const double tau = sample_increment(model, spec.S, clock_rng);
    const double xi = std::normal_distribution<double>()(diffusion_rng);
    const double log_growth = (drift - 0.5 * var) * tau + std::sqrt(var * tau) * xi;
    utilities[i] = x0_eta * std::exp(spec.eta * log_growth);
  });
  return MCSummary::from_samples(std::move(utilities));
}

MCSummary validate_portfolio(const PortfolioSpec& spec, const SubordinatorModel& model, double x0,
                             std::size_t n_paths, std::uint64_t seed, unsigned threads) {
  return simulate_terminal_utility(spec, model, optimal_allocation(spec).u_star, x0, n_paths, seed, threads);
}

}  // namespace tcc
