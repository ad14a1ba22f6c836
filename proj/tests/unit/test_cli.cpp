#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "commands.hpp"
#include "tcc/csv.hpp"
#include "tcc/matrix.hpp"

using namespace tcc;
using namespace tcc::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = TCC_CONFIG_DIR;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tcc_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Rows of a CSV with one comment line and one header line.
std::vector<std::vector<double>> csv_rows(const fs::path& p, std::string* header = nullptr) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# tcc ", 0), 0u) << p;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

fs::path write_json(const fs::path& dir, const std::string& name, const Json& doc) {
  const auto p = dir / name;
  std::ofstream(p) << doc.dump(2);
  return p;
}

}  // namespace

TEST(Config, FamilyAliases) {
  EXPECT_EQ(canonical_family("ig"), "inverse_gaussian");
  EXPECT_EQ(canonical_family("inverse-gaussian"), "inverse_gaussian");
  EXPECT_EQ(canonical_family("det"), "deterministic");
  EXPECT_EQ(canonical_family("gamma"), "gamma");
  EXPECT_FALSE(canonical_family("stable").has_value());
}

TEST(Config, JordanConfigParses) {
  const auto cfg = parse_config(load_json_file(kConfigs / "jordan_ig.json"), {true, true, true, true, true});
  EXPECT_EQ(cfg.model.family, "inverse_gaussian");
  EXPECT_EQ(cfg.plant.A.rows(), 2);
  EXPECT_EQ(cfg.cost.R(0, 0), 0.5);
  EXPECT_EQ(cfg.sim.n_paths, 1000u);
  EXPECT_EQ(cfg.x0(1), 1.0);
}

TEST(Config, AllViolationsReportedTogether) {
  Json doc = load_json_file(kConfigs / "jordan_ig.json");
  doc["model"]["family"] = "cauchy";
  doc["plant"]["B"] = Json::array({Json::array({0.0}), Json::array({1.0}), Json::array({2.0})});
  doc["cost"]["Phi"] = Json::array({Json::array({1.0})});
  doc["sim"]["ds"] = 0.3;
  doc["sim"]["colour"] = "blue";
  try {
    parse_config(doc, {true, true, true, true, true});
    FAIL();
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    EXPECT_GE(e.problems().size(), 5u) << what;
    for (const char* key : {"model.family", "plant.B", "cost.Phi", "ds", "colour"}) {
      EXPECT_NE(what.find(key), std::string::npos) << key << " missing from\n" << what;
    }
  }
}

TEST(Config, MissingBlocksAndShapes) {
  const Json doc{{"plant", {{"A", Json::array({Json::array({1.0, 2.0})})}}}};
  try {
    parse_config(doc, {true, true, true, false, true});
    FAIL();
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("missing block 'model'"), std::string::npos);
    EXPECT_NE(what.find("missing block 'cost'"), std::string::npos);
    EXPECT_NE(what.find("plant.B is required"), std::string::npos);
    EXPECT_NE(what.find("expected square"), std::string::npos);
  }
}

TEST(Config, OutputDirectoryFallsBackToEnvironment) {
  Json doc = load_json_file(kConfigs / "jordan_ig.json");
  ::setenv("TCC_OUTPUT_DIR", "/tmp/from_env", 1);
  EXPECT_EQ(parse_config(doc, {}).outputs.directory, fs::path("/tmp/from_env"));
  doc["outputs"]["directory"] = "/tmp/from_file";
  EXPECT_EQ(parse_config(doc, {}).outputs.directory, fs::path("/tmp/from_file"));
  ::unsetenv("TCC_OUTPUT_DIR");
  doc["outputs"].erase("directory");
  EXPECT_EQ(parse_config(doc, {}).outputs.directory, fs::path("."));
}

TEST(Config, HashIgnoresPlacementButNotNumbers) {
  Json doc = load_json_file(kConfigs / "jordan_ig.json");
  const auto h0 = config_hash(doc);
  doc["outputs"]["directory"] = "/elsewhere";
  doc["sim"]["threads"] = 3;
  EXPECT_EQ(config_hash(doc), h0);
  doc["sim"]["seed"] = 1;
  EXPECT_NE(config_hash(doc), h0);
}

TEST(Beta, ScalarOutputs) {
  auto r = run({"beta", "--family", "poisson", "--gamma", "1", "--z", "1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "1.718281828459045\n");
  r = run({"beta", "--family", "deterministic", "--b", "1", "--z", "0.3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0.3\n");
  r = run({"beta", "--family", "gamma", "--delta", "1", "--gamma", "1", "--z", "-1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_DOUBLE_EQ(std::stod(r.out), -std::log(2.0));
}

TEST(Beta, DomainViolationNamesRmax) {
  const auto r = run({"beta", "--family", "ig", "--delta", "2", "--gamma", "2", "--z", "3"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("r_max"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST(Beta, ModelProblemsAreValidationErrors) {
  const auto r = run({"beta", "--family", "gamma", "--z", "0.1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("model.delta"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("model.gamma"), std::string::npos) << r.err;
}

TEST(Beta, MatrixFile) {
  const auto dir = scratch_dir("beta_matrix");
  const auto in = write_json(dir, "a.json", Json::array({Json::array({0.2, 0.5}), Json::array({-0.3, -0.1})}));
  const auto out = dir / "beta.csv";
  const auto r = run({"beta", "--family", "ig", "--delta", "2", "--gamma", "2", "--matrix", in.string(), "--output",
                      out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string header;
  const auto rows = csv_rows(out, &header);
  EXPECT_EQ(header, "col_0,col_1");
  Matrix a(2, 2);
  a << 0.2, 0.5, -0.3, -0.1;
  const Matrix want = beta_matrix(SubordinatorModel::inverse_gaussian(2, 2), a);
  ASSERT_EQ(rows.size(), 2u);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_EQ(rows[i][j], want(i, j));
}

TEST(Usage, BadInvocationsExitOne) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"beta", "--family", "poisson", "--gamma", "1"}).code, 1);
  EXPECT_EQ(run({"beta", "--family", "poisson", "--z", "abc"}).code, 1);
  EXPECT_EQ(run({"riccati", "--config", "/nonexistent/config.json"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Riccati, JordanCurvesOrdered) {
  const auto dir = scratch_dir("riccati_e8");
  const auto r = run({"riccati", "--config", (kConfigs / "jordan_ig.json").string(), "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"riccati.csv", "gains.csv", "curves.csv", "policy_cost.csv"}) EXPECT_TRUE(fs::exists(dir / f));
  std::string header;
  const auto rows = csv_rows(dir / "curves.csv", &header);
  EXPECT_EQ(header, "s,V,J");
  ASSERT_EQ(rows.size(), 1001u);
  for (const auto& row : rows) EXPECT_LE(row[1], row[2] + 1e-12) << "s=" << row[0];
  EXPECT_LT(rows.front()[1], rows.front()[2]);
  EXPECT_EQ(rows.back()[0], 1.0);
  const auto summary = Json::parse(r.out);
  EXPECT_EQ(summary["value_at_0"].get<double>(), rows.front()[1]);
}

TEST(Riccati, DeterministicClockMakesNaiveOptimal) {
  const auto dir = scratch_dir("riccati_det");
  const auto r = run({"riccati", "--config", (kConfigs / "deterministic.json").string(), "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& row : csv_rows(dir / "curves.csv")) EXPECT_NEAR(row[1], row[2], 1e-8 * (1 + std::abs(row[1])));
}

TEST(Riccati, HalvedStepsAgree) {
  const auto dir = scratch_dir("riccati_half");
  ASSERT_EQ(run({"riccati", "--config", (kConfigs / "jordan_ig.json").string(), "--out", (dir / "a").string()}).code, 0);
  ASSERT_EQ(run({"riccati", "--config", (kConfigs / "jordan_ig.json").string(), "--out", (dir / "b").string(),
                 "--steps", "500"})
                .code,
            0);
  const auto full = csv_rows(dir / "a" / "riccati.csv");
  const auto half = csv_rows(dir / "b" / "riccati.csv");
  ASSERT_EQ(half.size(), 501u);
  for (std::size_t c = 1; c < 5; ++c) EXPECT_LT(std::abs(full.front()[c] - half.front()[c]), 1e-6);
}

TEST(Riccati, OverflowExitsThree) {
  const auto dir = scratch_dir("riccati_overflow");
  Json doc = load_json_file(kConfigs / "deterministic.json");
  doc["plant"] = {{"A", Json::array({Json::array({500.0})})}, {"B", Json::array({Json::array({0.0})})}};
  doc["cost"] = {{"Q", 0.0}, {"R", 1.0}, {"Phi", 1.0}, {"S", 1.0}};
  doc["sim"]["x0"] = Json::array({1.0});
  const auto cfg = write_json(dir, "overflow.json", doc);
  const auto r = run({"riccati", "--config", cfg.string(), "--out", dir.string()});
  EXPECT_EQ(r.code, 3) << r.err;
  EXPECT_NE(r.err.find("at s = "), std::string::npos) << r.err;
}

TEST(Riccati, InvalidConfigSingleDiagnostic) {
  const auto dir = scratch_dir("riccati_invalid");
  Json doc = load_json_file(kConfigs / "jordan_ig.json");
  doc["cost"]["R"] = Json::array({Json::array({-1.0})});
  doc["model"]["gamma"] = -2.0;
  const auto r = run({"riccati", "--config", write_json(dir, "bad.json", doc).string(), "--out", dir.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error: invalid configuration:", 0), 0u) << r.err;
  EXPECT_NE(r.err.find("model:"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "riccati.csv"));
}

TEST(Riccati, SpectrumOutsideDomainExitsTwo) {
  const auto dir = scratch_dir("riccati_domain");
  Json doc = load_json_file(kConfigs / "jordan_ig.json");
  doc["plant"]["A"] = Json::array({Json::array({1.5, 1.0}), Json::array({0.0, 1.5})});
  const auto r = run({"riccati", "--config", write_json(dir, "dom.json", doc).string(), "--out", dir.string()});
  EXPECT_EQ(r.code, 2) << r.err;
  EXPECT_NE(r.err.find("r_max"), std::string::npos) << r.err;
}

TEST(Simulate, WritesArtifactsAndSummary) {
  const auto dir = scratch_dir("simulate");
  const auto r = run({"simulate", "--config", (kConfigs / "jordan_ig.json").string(), "--out", dir.string(),
                      "--paths", "200"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream traj(dir / "trajectories.csv");
  std::string line;
  std::getline(traj, line);
  EXPECT_EQ(line.rfind("# tcc ", 0), 0u);
  std::getline(traj, line);
  EXPECT_EQ(line, "policy,path,s,tau,X_0,X_1,U_0,running_cost");
  std::size_t rows = 0;
  while (std::getline(traj, line)) ++rows;
  EXPECT_EQ(rows, 2u * 10u * 101u);
  std::string header;
  const auto summary = Json::parse(slurp(dir / "summary.json"));
  EXPECT_EQ(summary["optimal"]["n_paths"].get<std::size_t>() + summary["optimal"]["n_failed"].get<std::size_t>(),
            200u);
  EXPECT_EQ(summary["seed"].get<std::uint64_t>(), 2024u);
  EXPECT_LT(summary["value_at_0"].get<double>(), summary["naive_cost_at_0"].get<double>());
  const auto hist = csv_rows(dir / "histogram.csv", &header);
  EXPECT_EQ(header, "bin_lo,bin_hi,optimal_X_0,naive_X_0");
  EXPECT_EQ(hist.size(), 40u);
}

TEST(Simulate, TrajectoriesShareClockAcrossPolicies) {
  const auto dir = scratch_dir("simulate_clock");
  ASSERT_EQ(run({"simulate", "--config", (kConfigs / "jordan_ig.json").string(), "--out", dir.string(), "--paths",
                 "20"})
                .code,
            0);
  std::ifstream in(dir / "trajectories.csv");
  std::string line;
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> tau;
  std::getline(in, line);
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string policy, path, s, t;
    std::getline(ss, policy, ',');
    std::getline(ss, path, ',');
    std::getline(ss, s, ',');
    std::getline(ss, t, ',');
    tau[{path, policy}].push_back(t);
  }
  EXPECT_EQ(tau.size(), 20u);
  for (int i = 0; i < 10; ++i) {
    const auto p = std::to_string(i);
    const auto& opt = tau[{p, "optimal"}];
    const auto& naive = tau[{p, "naive"}];
    EXPECT_EQ(opt, naive) << "path " << i;
  }
}

TEST(Simulate, RepeatedRunsAreByteIdentical) {
  const auto dir = scratch_dir("simulate_repeat");
  const auto cfg = (kConfigs / "jordan_ig.json").string();
  ASSERT_EQ(run({"simulate", "--config", cfg, "--out", (dir / "a").string(), "--paths", "300", "--threads", "1"}).code,
            0);
  ASSERT_EQ(run({"simulate", "--config", cfg, "--out", (dir / "b").string(), "--paths", "300", "--threads", "5"}).code,
            0);
  for (const char* f : {"trajectories.csv", "histogram.csv", "summary.json"}) {
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  ASSERT_EQ(run({"simulate", "--config", cfg, "--out", (dir / "c").string(), "--paths", "300", "--seed", "9"}).code,
            0);
  EXPECT_NE(slurp(dir / "a" / "summary.json"), slurp(dir / "c" / "summary.json"));
}

TEST(Simulate, ArtifactSelection) {
  const auto dir = scratch_dir("simulate_select");
  Json doc = load_json_file(kConfigs / "jordan_ig.json");
  doc["outputs"]["artifacts"] = Json::array({"summary"});
  doc["sim"]["n_paths"] = 50;
  const auto r = run({"simulate", "--config", write_json(dir, "c.json", doc).string(), "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "summary.json"));
  EXPECT_FALSE(fs::exists(dir / "trajectories.csv"));
  EXPECT_FALSE(fs::exists(dir / "histogram.csv"));
}

TEST(Portfolio, SymmetricAndDeterministic) {
  auto r = run({"portfolio", "--mu1", "0.07", "--sigma1", "0.25", "--mu2", "0.07", "--sigma2", "0.25", "--eta", "0.4",
                "--paths", "2000"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = Json::parse(r.out);
  EXPECT_NEAR(j["u_star"].get<double>(), 0.5, 1e-15);
  EXPECT_EQ(j["beta_rho_star"].get<double>(), j["rho_star"].get<double>());
  r = run({"portfolio", "--mu1", "0.1", "--sigma1", "0.3", "--mu2", "0.05", "--sigma2", "0.2", "--eta", "0.5",
           "--family", "ig", "--delta", "2", "--gamma", "2", "--paths", "20000", "--seed", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  j = Json::parse(r.out);
  EXPECT_LE(std::abs(j["mc_mean"].get<double>() - j["value_at_0"].get<double>()), 4 * j["mc_stderr"].get<double>());
}

TEST(Portfolio, Errors) {
  auto r = run({"portfolio", "--mu1", "0.5", "--sigma1", "0.3", "--mu2", "0.4", "--sigma2", "0.2", "--eta", "0.5",
                "--family", "gamma", "--delta", "1", "--gamma", "0.05"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("r_max"), std::string::npos) << r.err;
  r = run({"portfolio", "--mu1", "0.1", "--sigma1", "-0.3", "--mu2", "0.05", "--sigma2", "0.2", "--eta", "1.5"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("eta"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("sigma1"), std::string::npos) << r.err;
}

TEST(Selftest, AllChecksPass) {
  const auto r = run({"selftest"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
}
