#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"
#include "tcc/portfolio.hpp"

namespace tcc::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitDomain = 2,
  kExitNumerical = 3,
};

/// Maps a caught exception to the process exit code.
int exit_code_for(const std::exception& e) noexcept;

struct RiccatiReport {
  RiccatiSolution optimal;
  GainSchedule naive;
  PolicyCostSolution naive_cost;
  double value_at_0 = 0.0;
  double naive_cost_at_0 = 0.0;
  std::vector<std::filesystem::path> written;
};

/// Solves for the optimal and naive schedules and writes riccati.csv,
/// gains.csv, curves.csv and policy_cost.csv as selected by the config.
RiccatiReport run_riccati(const ExperimentConfig& cfg);

struct SimulateReport {
  MCSummary optimal;
  MCSummary naive;
  double value_at_0 = 0.0;
  double naive_cost_at_0 = 0.0;
  std::vector<std::filesystem::path> written;
};

/// Simulates both policies on shared clock paths and writes
/// trajectories.csv, histogram.csv and summary.json.
SimulateReport run_simulate(const ExperimentConfig& cfg);

struct PortfolioRequest {
  PortfolioSpec spec;
  ModelSpec model;
  double x0 = 1.0;
  std::size_t n_paths = 100000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct PortfolioReport {
  Allocation allocation;
  double beta_rho_star = 0.0;
  double value_at_0 = 0.0;
  MCSummary mc;
};

PortfolioReport run_portfolio(const PortfolioRequest& req);
Json to_json(const PortfolioReport& report);

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast oracle checks: closed forms, a Laplace Monte Carlo, degenerate and
/// Bellman identities.
std::vector<SelftestCheck> run_selftest();

/// Full command-line entry. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tcc::cli
