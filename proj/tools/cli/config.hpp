#pragma once

// Experiment configuration: JSON blocks model, plant, cost, solver, sim, outputs.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcc/clock.hpp"
#include "tcc/lqr.hpp"
#include "tcc/simulation.hpp"

namespace tcc::cli {

using Json = nlohmann::json;

struct ModelSpec {
  std::string family;  ///< canonical name after alias resolution
  double b = 1.0;
  double gamma = 1.0;
  double delta = 1.0;

  SubordinatorModel build() const;
};

struct OutputSpec {
  std::filesystem::path directory;
  std::set<std::string> artifacts;  ///< empty: everything the command can write
  std::size_t histogram_bins = 30;
  std::size_t trajectory_paths = 10;

  bool wants(const std::string& artifact) const { return artifacts.empty() || artifacts.count(artifact) > 0; }
};

struct ExperimentConfig {
  ModelSpec model;
  LinearPlant plant;
  QuadraticCost cost;
  std::size_t solver_steps = kDefaultRiccatiSteps;
  SimConfig sim;
  Vector x0;
  OutputSpec outputs;
  Json effective;  ///< the document after flag overrides; hashed into metadata
};

/// Blocks a command reads. Missing required blocks are validation errors.
struct Requirements {
  bool model = true;
  bool plant = true;
  bool cost = true;
  bool sim = false;  ///< validate the simulation settings
  bool x0 = false;   ///< sim.x0 must be present
};

/// Thrown with every violation found in one pass, one per line.
class ConfigError : public ContractError {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Maps aliases such as "ig" or "det" to canonical family names.
std::optional<std::string> canonical_family(const std::string& name);

Json load_json_file(const std::filesystem::path& path);

/// Parses and validates a document. The output directory falls back to
/// $TCC_OUTPUT_DIR, then the working directory.
ExperimentConfig parse_config(const Json& doc, const Requirements& need);

/// Reads a model block ({"family": ..., parameters}) and appends problems.
ModelSpec parse_model(const Json& block, std::vector<std::string>& problems);

/// 64-bit FNV-1a of the compact serialization, ignoring outputs.directory
/// and sim.threads.
std::uint64_t config_hash(const Json& doc);

/// "tcc <version> seed=<seed> config=<hash>" for CSV comment lines.
std::string metadata_line(const ExperimentConfig& cfg);

std::string version_string();

}  // namespace tcc::cli
