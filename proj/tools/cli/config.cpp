#include "config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "tcc/csv.hpp"
#include "tcc/error.hpp"

#ifndef TCC_VERSION
#define TCC_VERSION "0.0.0"
#endif

namespace tcc::cli {

namespace {

std::string join_lines(const std::vector<std::string>& items) {
  std::string out = "invalid configuration:";
  for (const auto& item : items) out += "\n  - " + item;
  return out;
}

void check_keys(const Json& block, const std::string& where, const std::set<std::string>& allowed,
                std::vector<std::string>& problems) {
  for (const auto& [key, value] : block.items()) {
    if (allowed.count(key) == 0) problems.push_back(where + ": unknown key '" + key + "'");
  }
}

std::optional<double> read_number(const Json& block, const std::string& key, const std::string& where,
                                  std::vector<std::string>& problems, bool required) {
  if (!block.contains(key)) {
    if (required) problems.push_back(where + "." + key + " is required");
    return std::nullopt;
  }
  const auto& v = block.at(key);
  if (!v.is_number()) {
    problems.push_back(where + "." + key + " must be a number");
    return std::nullopt;
  }
  return v.get<double>();
}

template <class UInt>
std::optional<UInt> read_count(const Json& block, const std::string& key, const std::string& where,
                               std::vector<std::string>& problems) {
  if (!block.contains(key)) return std::nullopt;
  const auto& v = block.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
    problems.push_back(where + "." + key + " must be a non-negative integer");
    return std::nullopt;
  }
  return v.get<UInt>();
}

// A matrix is a nested array of equal-length numeric rows, or a bare number for 1 x 1.
std::optional<Matrix> read_matrix(const Json& block, const std::string& key, const std::string& where,
                                  std::vector<std::string>& problems, bool required) {
  const std::string name = where + "." + key;
  if (!block.contains(key)) {
    if (required) problems.push_back(name + " is required");
    return std::nullopt;
  }
  const auto& v = block.at(key);
  if (v.is_number()) return Matrix::Constant(1, 1, v.get<double>());
  if (!v.is_array() || v.empty() || !v.front().is_array() || v.front().empty()) {
    problems.push_back(name + " must be a non-empty nested array of rows");
    return std::nullopt;
  }
  const auto rows = static_cast<Index>(v.size());
  const auto cols = static_cast<Index>(v.front().size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      problems.push_back(name + " has ragged rows");
      return std::nullopt;
    }
    for (Index j = 0; j < cols; ++j) {
      const auto& x = row[static_cast<std::size_t>(j)];
      if (!x.is_number()) {
        problems.push_back(name + " has a non-numeric entry");
        return std::nullopt;
      }
      m(i, j) = x.get<double>();
    }
  }
  if (!m.allFinite()) {
    problems.push_back(name + " has non-finite entries");
    return std::nullopt;
  }
  return m;
}

std::optional<Vector> read_vector(const Json& block, const std::string& key, const std::string& where,
                                  std::vector<std::string>& problems) {
  const std::string name = where + "." + key;
  if (!block.contains(key)) {
    problems.push_back(name + " is required");
    return std::nullopt;
  }
  const auto& v = block.at(key);
  if (v.is_number()) return Vector::Constant(1, v.get<double>());
  if (!v.is_array() || v.empty()) {
    problems.push_back(name + " must be a non-empty array of numbers");
    return std::nullopt;
  }
  Vector out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      problems.push_back(name + " has a non-numeric entry");
      return std::nullopt;
    }
    out(static_cast<Index>(i)) = v[i].get<double>();
  }
  return out;
}

std::string shape(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

void expect_shape(const std::optional<Matrix>& m, Index rows, Index cols, const std::string& name,
                  std::vector<std::string>& problems) {
  if (m && (m->rows() != rows || m->cols() != cols)) {
    problems.push_back(name + " is " + shape(*m) + ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

const Json* block_of(const Json& doc, const std::string& name, bool required, std::vector<std::string>& problems) {
  if (!doc.contains(name)) {
    if (required) problems.push_back("missing block '" + name + "'");
    return nullptr;
  }
  const auto& b = doc.at(name);
  if (!b.is_object()) {
    problems.push_back("block '" + name + "' must be an object");
    return nullptr;
  }
  return &b;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : ContractError(join_lines(problems)), problems_(std::move(problems)) {}

std::optional<std::string> canonical_family(const std::string& name) {
  static const std::map<std::string, std::string> aliases{
      {"deterministic", "deterministic"},     {"det", "deterministic"},
      {"drift", "deterministic"},             {"poisson", "poisson"},
      {"gamma", "gamma"},                     {"inverse_gaussian", "inverse_gaussian"},
      {"inverse-gaussian", "inverse_gaussian"}, {"ig", "inverse_gaussian"},
  };
  const auto it = aliases.find(name);
  if (it == aliases.end()) return std::nullopt;
  return it->second;
}

SubordinatorModel ModelSpec::build() const {
  if (family == "deterministic") return SubordinatorModel::deterministic(b);
  if (family == "poisson") return SubordinatorModel::poisson(gamma);
  if (family == "gamma") return SubordinatorModel::gamma(delta, gamma);
  if (family == "inverse_gaussian") return SubordinatorModel::inverse_gaussian(delta, gamma);
  throw ContractError("unknown clock family '" + family + "'");
}

ModelSpec parse_model(const Json& block, std::vector<std::string>& problems) {
  ModelSpec spec;
  check_keys(block, "model", {"family", "b", "gamma", "delta"}, problems);
  if (!block.contains("family") || !block.at("family").is_string()) {
    problems.push_back("model.family is required (deterministic, poisson, gamma, inverse_gaussian)");
    return spec;
  }
  const auto name = block.at("family").get<std::string>();
  const auto family = canonical_family(name);
  if (!family) {
    problems.push_back("model.family '" + name + "' is not one of deterministic, poisson, gamma, inverse_gaussian");
    return spec;
  }
  spec.family = *family;
  const std::size_t before = problems.size();
  if (spec.family == "deterministic") {
    if (auto b = read_number(block, "b", "model", problems, false)) spec.b = *b;
  } else if (spec.family == "poisson") {
    if (auto g = read_number(block, "gamma", "model", problems, true)) spec.gamma = *g;
  } else {
    if (auto d = read_number(block, "delta", "model", problems, true)) spec.delta = *d;
    if (auto g = read_number(block, "gamma", "model", problems, true)) spec.gamma = *g;
  }
  if (problems.size() == before) {
    try {
      (void)spec.build();
    } catch (const ContractError& e) {
      problems.push_back(std::string("model: ") + e.what());
    }
  }
  return spec;
}

Json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path.string() + "'"});
  try {
    return Json::parse(in, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw ConfigError({"config file '" + path.string() + "' is not valid JSON: " + e.what()});
  }
}

ExperimentConfig parse_config(const Json& doc, const Requirements& need) {
  std::vector<std::string> problems;
  ExperimentConfig cfg;
  cfg.effective = doc;
  if (!doc.is_object()) throw ConfigError({"config must be a JSON object"});
  check_keys(doc, "config", {"model", "plant", "cost", "solver", "sim", "outputs"}, problems);

  if (const Json* m = block_of(doc, "model", need.model, problems)) cfg.model = parse_model(*m, problems);

  std::optional<Matrix> a, b, mm, q, r, phi;
  if (const Json* p = block_of(doc, "plant", need.plant, problems)) {
    check_keys(*p, "plant", {"A", "B", "M"}, problems);
    a = read_matrix(*p, "A", "plant", problems, true);
    b = read_matrix(*p, "B", "plant", problems, true);
    mm = read_matrix(*p, "M", "plant", problems, false);
  }
  Index n = a ? a->rows() : 0;
  Index inputs = b ? b->cols() : 0;
  if (a && a->cols() != a->rows()) problems.push_back("plant.A is " + shape(*a) + ", expected square");
  if (a) {
    expect_shape(b, n, inputs, "plant.B", problems);
    if (mm && mm->rows() != n) problems.push_back("plant.M is " + shape(*mm) + ", expected " + std::to_string(n) + " rows");
  }

  if (const Json* c = block_of(doc, "cost", need.cost, problems)) {
    check_keys(*c, "cost", {"Q", "R", "Phi", "S"}, problems);
    q = read_matrix(*c, "Q", "cost", problems, true);
    r = read_matrix(*c, "R", "cost", problems, true);
    phi = read_matrix(*c, "Phi", "cost", problems, true);
    if (auto s = read_number(*c, "S", "cost", problems, false)) cfg.cost.S = *s;
    if (!(cfg.cost.S > 0.0) || !std::isfinite(cfg.cost.S)) problems.push_back("cost.S must be positive and finite");
    if (a) {
      expect_shape(q, n, n, "cost.Q", problems);
      expect_shape(phi, n, n, "cost.Phi", problems);
    }
    if (b) expect_shape(r, inputs, inputs, "cost.R", problems);
  }

  if (const Json* s = block_of(doc, "solver", false, problems)) {
    check_keys(*s, "solver", {"n_steps"}, problems);
    if (auto v = read_count<std::size_t>(*s, "n_steps", "solver", problems)) cfg.solver_steps = *v;
  }
  if (cfg.solver_steps < 1) problems.push_back("solver.n_steps must be at least 1");

  const Json* sim = block_of(doc, "sim", need.sim || need.x0, problems);
  if (sim) {
    check_keys(*sim, "sim", {"ds", "substeps", "n_paths", "seed", "max_plant_step", "threads", "x0"}, problems);
    if (auto v = read_number(*sim, "ds", "sim", problems, false)) cfg.sim.ds = *v;
    if (auto v = read_count<std::size_t>(*sim, "substeps", "sim", problems)) cfg.sim.substeps = *v;
    if (auto v = read_count<std::size_t>(*sim, "n_paths", "sim", problems)) cfg.sim.n_paths = *v;
    if (auto v = read_count<std::uint64_t>(*sim, "seed", "sim", problems)) cfg.sim.seed = *v;
    if (auto v = read_number(*sim, "max_plant_step", "sim", problems, false)) cfg.sim.max_plant_step = *v;
    if (auto v = read_count<unsigned>(*sim, "threads", "sim", problems)) cfg.sim.threads = *v;
    if (sim->contains("x0") || need.x0) {
      if (auto x = read_vector(*sim, "x0", "sim", problems)) {
        cfg.x0 = *x;
        if (a && cfg.x0.size() != n) {
          problems.push_back("sim.x0 has " + std::to_string(cfg.x0.size()) + " entries, expected " + std::to_string(n));
        }
      }
    }
    if (need.sim) {
      try {
        cfg.sim.validate(cfg.cost.S);
      } catch (const ContractError& e) {
        problems.push_back(std::string("sim: ") + e.what());
      }
    }
  }

  if (const Json* o = block_of(doc, "outputs", false, problems)) {
    check_keys(*o, "outputs", {"directory", "artifacts", "histogram_bins", "trajectory_paths"}, problems);
    if (o->contains("directory")) {
      if (o->at("directory").is_string()) {
        cfg.outputs.directory = o->at("directory").get<std::string>();
      } else {
        problems.push_back("outputs.directory must be a string");
      }
    }
    if (o->contains("artifacts")) {
      const auto& list = o->at("artifacts");
      if (!list.is_array()) {
        problems.push_back("outputs.artifacts must be an array of names");
      } else {
        for (const auto& item : list) {
          if (item.is_string()) {
            cfg.outputs.artifacts.insert(item.get<std::string>());
          } else {
            problems.push_back("outputs.artifacts entries must be strings");
          }
        }
      }
    }
    if (auto v = read_count<std::size_t>(*o, "histogram_bins", "outputs", problems)) cfg.outputs.histogram_bins = *v;
    if (auto v = read_count<std::size_t>(*o, "trajectory_paths", "outputs", problems)) {
      cfg.outputs.trajectory_paths = *v;
    }
    if (cfg.outputs.histogram_bins < 1) problems.push_back("outputs.histogram_bins must be at least 1");
  }
  if (cfg.outputs.directory.empty()) {
    const char* env = std::getenv("TCC_OUTPUT_DIR");
    cfg.outputs.directory = (env != nullptr && *env != '\0') ? std::filesystem::path(env) : std::filesystem::path(".");
  }

  // Structural checks on the assembled plant and cost only make sense once shapes agree.
  if (problems.empty() && a) {
    cfg.plant = {*a, *b, mm ? *mm : Matrix::Zero(n, 1)};
    try {
      cfg.plant.validate();
    } catch (const ContractError& e) {
      problems.push_back(std::string("plant: ") + e.what());
    }
    if (q) {
      cfg.cost.Q = *q;
      cfg.cost.R = *r;
      cfg.cost.Phi = *phi;
      try {
        cfg.cost.validate(cfg.plant);
      } catch (const ContractError& e) {
        problems.push_back(std::string("cost: ") + e.what());
      }
    }
  }
  if (need.x0 && problems.empty() && cfg.x0.size() == 0) problems.push_back("sim.x0 is required");

  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

std::uint64_t config_hash(const Json& doc) {
  // Where files go and how many threads run do not change any number written.
  Json keyed = doc;
  if (keyed.is_object()) {
    if (keyed.contains("outputs") && keyed["outputs"].is_object()) keyed["outputs"].erase("directory");
    if (keyed.contains("sim") && keyed["sim"].is_object()) keyed["sim"].erase("threads");
  }
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : keyed.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string version_string() { return TCC_VERSION; }

std::string metadata_line(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "tcc " << version_string() << " seed=" << cfg.sim.seed << " config=" << std::hex << std::setw(16)
     << std::setfill('0') << config_hash(cfg.effective);
  return os.str();
}

}  // namespace tcc::cli
