#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "tcc/csv.hpp"
#include "tcc/error.hpp"
#include "tcc/matrix.hpp"

namespace tcc::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ContractError("cannot write '" + path.string() + "'");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw NumericalError("write to '" + path.string() + "' failed");
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

std::string hex_hash(const Json& doc) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << config_hash(doc);
  return os.str();
}

Json summary_block(const MCSummary& mc) {
  std::vector<double> x0;
  x0.reserve(mc.terminal_states.size());
  for (const auto& x : mc.terminal_states) x0.push_back(x(0));
  return Json{{"mc_mean", mc.mean},
              {"mc_stderr", mc.std_error},
              {"n_paths", mc.n_paths},
              {"n_failed", mc.n_failed},
              {"terminal_X_0_variance", sample_variance(x0)}};
}

std::string with_location(const NumericalError& e) {
  std::ostringstream os;
  if (const auto* s = dynamic_cast<const SolverError*>(&e)) {
    os << "numerical failure at s = " << format_double(s->s()) << ": " << e.what();
  } else if (const auto* d = dynamic_cast<const DivergenceError*>(&e)) {
    os << "numerical failure at s = " << format_double(d->s()) << ": " << e.what();
  } else {
    os << "numerical failure: " << e.what();
  }
  return os.str();
}

// Runs body and converts library exceptions into a diagnostic and an exit code.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const NumericalError& e) {
    err << "error: " << with_location(e) << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

Json apply_overrides(Json doc, const std::optional<std::string>& out_dir, const std::optional<std::uint64_t>& seed,
                     const std::optional<std::size_t>& paths, const std::optional<double>& ds,
                     const std::optional<std::size_t>& substeps, const std::optional<std::size_t>& steps,
                     const std::optional<unsigned>& threads) {
  if (!doc.is_object()) return doc;
  if (out_dir) doc["outputs"]["directory"] = *out_dir;
  if (seed) doc["sim"]["seed"] = *seed;
  if (paths) doc["sim"]["n_paths"] = *paths;
  if (ds) doc["sim"]["ds"] = *ds;
  if (substeps) doc["sim"]["substeps"] = *substeps;
  if (threads) doc["sim"]["threads"] = *threads;
  if (steps) doc["solver"]["n_steps"] = *steps;
  return doc;
}

Matrix read_matrix_file(const fs::path& path) {
  const Json doc = load_json_file(path);
  const Json* rows = &doc;
  if (doc.is_object() && doc.contains("A")) rows = &doc.at("A");
  if (!rows->is_array() || rows->empty() || !rows->front().is_array()) {
    throw ConfigError({"matrix file '" + path.string() + "' must hold a nested array of rows"});
  }
  const auto n = static_cast<Index>(rows->size());
  const auto m = static_cast<Index>(rows->front().size());
  Matrix a(n, m);
  for (Index i = 0; i < n; ++i) {
    const auto& row = (*rows)[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != m) {
      throw ConfigError({"matrix file '" + path.string() + "' has ragged rows"});
    }
    for (Index j = 0; j < m; ++j) a(i, j) = row[static_cast<std::size_t>(j)].get<double>();
  }
  if (n != m) throw ConfigError({"matrix in '" + path.string() + "' is not square"});
  return a;
}

}  // namespace

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const NumericalError*>(&e) != nullptr) return kExitNumerical;
  if (dynamic_cast<const ContractError*>(&e) != nullptr) return kExitDomain;
  if (dynamic_cast<const DomainError*>(&e) != nullptr) return kExitDomain;
  if (dynamic_cast<const fs::filesystem_error*>(&e) != nullptr) return kExitDomain;
  return kExitNumerical;
}

RiccatiReport run_riccati(const ExperimentConfig& cfg) {
  const auto model = cfg.model.build();
  const TimeChangedMappings maps(model, cfg.plant);
  RiccatiReport rep;
  rep.optimal = solve_riccati(maps, cfg.plant, cfg.cost, cfg.solver_steps);
  rep.naive = classical_lqr(cfg.plant, cfg.cost, cfg.solver_steps);
  rep.naive_cost = policy_cost(maps, cfg.plant, cfg.cost, rep.naive, cfg.solver_steps);
  rep.value_at_0 = rep.optimal.at(0, cfg.x0);
  rep.naive_cost_at_0 = rep.naive_cost.at(0, cfg.x0);

  const auto& dir = cfg.outputs.directory;
  fs::create_directories(dir);
  const std::string meta = metadata_line(cfg);

  if (cfg.outputs.wants("riccati")) {
    const auto path = dir / "riccati.csv";
    auto out = open_output(path);
    write_riccati_csv(out, rep.optimal, meta);
    finish(out, path);
    rep.written.push_back(path);
  }
  if (cfg.outputs.wants("gains")) {
    const auto path = dir / "gains.csv";
    auto out = open_output(path);
    write_csv_comment(out, meta);
    const Matrix& k0 = rep.optimal.K.front();
    std::vector<std::string> header{"s"};
    for (auto& name : vec_column_names("K_opt", k0.rows(), k0.cols())) header.push_back(std::move(name));
    for (auto& name : vec_column_names("K_naive", k0.rows(), k0.cols())) header.push_back(std::move(name));
    write_csv_header(out, header);
    std::vector<double> row;
    for (std::size_t k = 0; k < rep.optimal.s.size(); ++k) {
      const double s = rep.optimal.s[k];
      row.assign({s});
      const Vector ko = vec(rep.optimal.K[k]);
      const Vector kn = vec(rep.naive(s));
      row.insert(row.end(), ko.data(), ko.data() + ko.size());
      row.insert(row.end(), kn.data(), kn.data() + kn.size());
      write_csv_row(out, row);
    }
    finish(out, path);
    rep.written.push_back(path);
  }
  if (cfg.outputs.wants("curves")) {
    const auto path = dir / "curves.csv";
    auto out = open_output(path);
    write_csv_comment(out, meta);
    write_csv_header(out, {"s", "V", "J"});
    for (std::size_t k = 0; k < rep.optimal.s.size(); ++k) {
      write_csv_row(out, {rep.optimal.s[k], rep.optimal.at(k, cfg.x0), rep.naive_cost.at(k, cfg.x0)});
    }
    finish(out, path);
    rep.written.push_back(path);
  }
  if (cfg.outputs.wants("policy_cost")) {
    const auto path = dir / "policy_cost.csv";
    auto out = open_output(path);
    write_policy_cost_csv(out, rep.naive_cost, rep.naive, meta);
    finish(out, path);
    rep.written.push_back(path);
  }
  return rep;
}

SimulateReport run_simulate(const ExperimentConfig& cfg) {
  const auto model = cfg.model.build();
  const TimeChangedMappings maps(model, cfg.plant);
  const auto sol = solve_riccati(maps, cfg.plant, cfg.cost, cfg.solver_steps);
  const auto naive = classical_lqr(cfg.plant, cfg.cost, cfg.solver_steps);
  const auto naive_cost = policy_cost(maps, cfg.plant, cfg.cost, naive, cfg.solver_steps);
  const auto optimal_gains = sol.gain_schedule();

  // Stream 0 and 1 share clock paths and differ in Brownian draws.
  constexpr std::uint64_t kOptimalStream = 0;
  constexpr std::uint64_t kNaiveStream = 1;

  SimulateReport rep;
  rep.value_at_0 = sol.at(0, cfg.x0);
  rep.naive_cost_at_0 = naive_cost.at(0, cfg.x0);
  rep.optimal = estimate_cost(model, cfg.plant, cfg.cost, optimal_gains, cfg.x0, cfg.sim, kOptimalStream);
  rep.naive = estimate_cost(model, cfg.plant, cfg.cost, naive, cfg.x0, cfg.sim, kNaiveStream);
  if (rep.optimal.n_paths == 0 || rep.naive.n_paths == 0) {
    throw NumericalError("every simulated path diverged; reduce ds or max_plant_step");
  }

  const auto& dir = cfg.outputs.directory;
  fs::create_directories(dir);
  const std::string meta = metadata_line(cfg);

  if (cfg.outputs.wants("trajectories")) {
    const std::size_t shown = std::min(cfg.outputs.trajectory_paths, cfg.sim.n_paths);
    std::vector<TrajectoryRecord> records;
    std::vector<LabeledTrajectory> labels;
    records.reserve(2 * shown);
    for (std::size_t i = 0; i < shown; ++i) {
      for (const auto& [policy, gains, stream] :
           {std::tuple{"optimal", &optimal_gains, kOptimalStream}, std::tuple{"naive", &naive, kNaiveStream}}) {
        try {
          records.push_back(simulate_trajectory(model, cfg.plant, cfg.cost, *gains, cfg.x0, cfg.sim,
                                                path_seeds(cfg.sim.seed, i, stream)));
          labels.push_back({policy, i, nullptr});
        } catch (const DivergenceError&) {
        }
      }
    }
    for (std::size_t j = 0; j < labels.size(); ++j) labels[j].record = &records[j];
    const auto path = dir / "trajectories.csv";
    auto out = open_output(path);
    write_trajectory_csv(out, labels, meta);
    finish(out, path);
    rep.written.push_back(path);
  }
  if (cfg.outputs.wants("histogram")) {
    std::vector<double> opt, nai;
    for (const auto& x : rep.optimal.terminal_states) opt.push_back(x(0));
    for (const auto& x : rep.naive.terminal_states) nai.push_back(x(0));
    const auto path = dir / "histogram.csv";
    auto out = open_output(path);
    write_histogram_csv(out, {{"optimal_X_0", opt}, {"naive_X_0", nai}}, cfg.outputs.histogram_bins, meta);
    finish(out, path);
    rep.written.push_back(path);
  }
  if (cfg.outputs.wants("summary")) {
    Json summary{{"version", version_string()},
                 {"seed", cfg.sim.seed},
                 {"config_hash", hex_hash(cfg.effective)},
                 {"x0", vector_json(cfg.x0)},
                 {"value_at_0", rep.value_at_0},
                 {"naive_cost_at_0", rep.naive_cost_at_0},
                 {"optimal", summary_block(rep.optimal)},
                 {"naive", summary_block(rep.naive)}};
    const auto path = dir / "summary.json";
    auto out = open_output(path);
    out << summary.dump(2) << '\n';
    finish(out, path);
    rep.written.push_back(path);
  }
  return rep;
}

PortfolioReport run_portfolio(const PortfolioRequest& req) {
  const auto model = req.model.build();
  PortfolioReport rep;
  rep.allocation = optimal_allocation(req.spec);
  rep.value_at_0 = value_function(req.spec, model, 0.0, req.x0);
  rep.beta_rho_star = beta_real(model, rep.allocation.rho_star);
  rep.mc = validate_portfolio(req.spec, model, req.x0, req.n_paths, req.seed, req.threads);
  return rep;
}

Json to_json(const PortfolioReport& report) {
  return Json{{"u_star", report.allocation.u_star},         {"rho_star", report.allocation.rho_star},
              {"beta_rho_star", report.beta_rho_star},      {"value_at_0", report.value_at_0},
              {"mc_mean", report.mc.mean},                  {"mc_stderr", report.mc.std_error},
              {"n_paths", report.mc.n_paths}};
}

std::vector<SelftestCheck> run_selftest() {
  std::vector<SelftestCheck> checks;
  auto record = [&](std::string name, auto&& body) {
    SelftestCheck c{std::move(name), false, {}};
    try {
      std::tie(c.passed, c.detail) = body();
    } catch (const std::exception& e) {
      c.detail = std::string("threw: ") + e.what();
    }
    checks.push_back(std::move(c));
  };

  record("poisson beta closed form", [] {
    const double got = beta_real(SubordinatorModel::poisson(1.0), 1.0);
    return std::pair{std::abs(got - std::expm1(1.0)) <= 1e-15, format_double(got)};
  });

  record("inverse gaussian laplace monte carlo", [] {
    const auto ig = SubordinatorModel::inverse_gaussian(2.0, 2.0);
    Engine rng(20240601);
    const std::size_t n = 20000;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = std::exp(0.5 * sample_increment(ig, 1.0, rng));
      sum += v;
      sum2 += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / (n - 1));
    const double want = std::exp(beta_real(ig, 0.5));
    return std::pair{std::abs(mean - want) <= 4.0 * se, format_double(mean) + " vs " + format_double(want)};
  });

  record("scalar mappings closed form", [] {
    const auto gamma = SubordinatorModel::gamma(1.0, 1.0);
    const double mu = 0.3, p = 1.3;
    const LinearPlant plant{Matrix::Constant(1, 1, mu), Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 0.7)};
    const auto m = compute_mappings(gamma, plant, Matrix::Constant(1, 1, p));
    const double b1 = beta_real(gamma, mu), b2 = beta_real(gamma, 2 * mu);
    const double err = std::max({std::abs(m.FP(0, 0) - b2 * p), std::abs(m.GP(0, 0) - (b2 - b1) / mu * p),
                                 std::abs(m.HP(0, 0) - (b2 - 2 * b1) / (mu * mu) * p)});
    return std::pair{err <= 1e-10, "max error " + format_double(err)};
  });

  record("noiseless clock gives Lyapunov drift", [] {
    Matrix a(2, 2), p(2, 2);
    a << 0.2, 0.5, -0.3, -0.1;
    p << 2.0, 0.3, 0.3, 1.0;
    const LinearPlant plant{a, Matrix::Identity(2, 1), Matrix::Zero(2, 1)};
    const auto m = compute_mappings(SubordinatorModel::deterministic(1.0), plant, p);
    const double err = (m.FP - (a.transpose() * p + p * a)).norm() + (m.GP - p).norm() + m.HP.norm();
    return std::pair{err <= 1e-10, "error " + format_double(err)};
  });

  record("bellman residual at optimal input", [] {
    Matrix a(2, 2), b(2, 1), phi(2, 2);
    a << 0.75, 1.0, 0.0, 0.75;
    b << 0.0, 1.0;
    phi << 1.0, 0.0, 0.0, 0.0;
    const LinearPlant plant{a, b, Matrix::Zero(2, 1)};
    const QuadraticCost cost{Matrix::Zero(2, 2), Matrix::Constant(1, 1, 0.5), phi, 1.0};
    const TimeChangedMappings maps(SubordinatorModel::inverse_gaussian(2.0, 2.0), plant);
    const auto sol = solve_riccati(maps, plant, cost);
    double worst = 0.0;
    Vector x(2);
    x << 0.4, -0.9;
    for (std::size_t node : {std::size_t{10}, std::size_t{500}, std::size_t{990}}) {
      const Vector u = sol.K[node] * x;
      worst = std::max(worst, std::abs(bellman_residual(maps, plant, cost, sol, node, x, u)));
    }
    return std::pair{worst <= 1e-5 * (1.0 + x.squaredNorm()), "max residual " + format_double(worst)};
  });

  record("symmetric portfolio splits evenly", [] {
    const PortfolioSpec spec{0.07, 0.25, 0.07, 0.25, 0.4, 1.0};
    const double u = optimal_allocation(spec).u_star;
    return std::pair{std::abs(u - 0.5) <= 1e-12, format_double(u)};
  });
  return checks;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-changed LQR and portfolio experiments", "tcc"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  // beta
  auto* beta = app.add_subcommand("beta", "Evaluate beta(z) or the matrix function beta(A)");
  std::string family;
  std::optional<double> drift, rate, shape_delta, z;
  std::string matrix_file, beta_output;
  beta->add_option("--family", family, "deterministic | poisson | gamma | inverse_gaussian (alias ig)")->required();
  beta->add_option("--b", drift, "drift of the deterministic clock");
  beta->add_option("--gamma", rate, "gamma parameter");
  beta->add_option("--delta", shape_delta, "delta parameter");
  auto* z_opt = beta->add_option("--z", z, "real argument");
  auto* m_opt = beta->add_option("--matrix", matrix_file, "JSON file holding a square matrix as nested rows");
  beta->add_option("--output", beta_output, "CSV path for beta(A); standard output when omitted");
  z_opt->excludes(m_opt);

  // riccati / simulate share the config flags
  struct RunFlags {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<double> ds;
    std::optional<std::size_t> substeps;
    std::optional<std::size_t> steps;
    std::optional<unsigned> threads;
  };
  RunFlags riccati_flags, simulate_flags;
  auto add_run_flags = [](CLI::App* cmd, RunFlags& f, bool sim) {
    cmd->add_option("--config", f.config, "experiment JSON")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", f.out, "output directory (default: outputs.directory, then $TCC_OUTPUT_DIR)");
    cmd->add_option("--steps", f.steps, "Riccati grid steps");
    if (sim) {
      cmd->add_option("--seed", f.seed, "master seed");
      cmd->add_option("--paths", f.paths, "number of Monte Carlo paths");
      cmd->add_option("--ds", f.ds, "controller time step");
      cmd->add_option("--substeps", f.substeps, "Euler-Maruyama steps per controller step");
      cmd->add_option("--threads", f.threads, "worker threads, 0 for all cores");
    }
  };
  auto* riccati = app.add_subcommand("riccati", "Solve the optimal and naive schedules and write the curves");
  add_run_flags(riccati, riccati_flags, false);
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo comparison of the optimal and naive policies");
  add_run_flags(simulate, simulate_flags, true);

  // portfolio
  auto* portfolio = app.add_subcommand("portfolio", "Two-asset power-utility allocation under a random clock");
  PortfolioRequest preq;
  std::string pfamily = "deterministic";
  std::optional<double> pdrift, prate, pdelta;
  portfolio->add_option("--mu1", preq.spec.mu1)->required();
  portfolio->add_option("--sigma1", preq.spec.sigma1)->required();
  portfolio->add_option("--mu2", preq.spec.mu2)->required();
  portfolio->add_option("--sigma2", preq.spec.sigma2)->required();
  portfolio->add_option("--eta", preq.spec.eta, "utility exponent in (0, 1)")->required();
  portfolio->add_option("--S", preq.spec.S, "horizon")->capture_default_str();
  portfolio->add_option("--x0", preq.x0, "initial wealth")->capture_default_str();
  portfolio->add_option("--family", pfamily)->capture_default_str();
  portfolio->add_option("--b", pdrift);
  portfolio->add_option("--gamma", prate);
  portfolio->add_option("--delta", pdelta);
  portfolio->add_option("--paths", preq.n_paths)->capture_default_str();
  portfolio->add_option("--seed", preq.seed)->capture_default_str();
  portfolio->add_option("--threads", preq.threads)->capture_default_str();

  auto* selftest = app.add_subcommand("selftest", "Run the built-in oracle checks");

  std::vector<std::string> argv_store{"tcc"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto model_json = [](const std::string& fam, const std::optional<double>& b, const std::optional<double>& g,
                       const std::optional<double>& d) {
    Json block{{"family", fam}};
    if (b) block["b"] = *b;
    if (g) block["gamma"] = *g;
    if (d) block["delta"] = *d;
    return block;
  };

  if (beta->parsed()) {
    if (!z && matrix_file.empty()) {
      err << "beta: one of --z or --matrix is required\n" << beta->help();
      return kExitUsage;
    }
    return guarded(err, [&] {
      std::vector<std::string> problems;
      const auto spec = parse_model(model_json(family, drift, rate, shape_delta), problems);
      if (!problems.empty()) throw ConfigError(std::move(problems));
      const auto model = spec.build();
      if (z) {
        out << format_double(beta_real(model, *z)) << '\n';
        return static_cast<int>(kExitOk);
      }
      const Matrix a = read_matrix_file(matrix_file);
      const Matrix result = beta_matrix(model, a);
      std::ofstream file;
      std::ostream* sink = &out;
      if (!beta_output.empty()) {
        file = open_output(beta_output);
        sink = &file;
      }
      write_csv_comment(*sink, "tcc " + version_string() + " beta family=" + spec.family);
      std::vector<std::string> header;
      for (Index j = 0; j < result.cols(); ++j) header.push_back("col_" + std::to_string(j));
      write_csv_header(*sink, header);
      std::vector<double> row(static_cast<std::size_t>(result.cols()));
      for (Index i = 0; i < result.rows(); ++i) {
        for (Index j = 0; j < result.cols(); ++j) row[static_cast<std::size_t>(j)] = result(i, j);
        write_csv_row(*sink, row);
      }
      if (file.is_open()) finish(file, beta_output);
      return static_cast<int>(kExitOk);
    });
  }

  auto load = [&](const RunFlags& f, const Requirements& need) {
    Json doc = load_json_file(f.config);
    doc = apply_overrides(std::move(doc), f.out, f.seed, f.paths, f.ds, f.substeps, f.steps, f.threads);
    return parse_config(doc, need);
  };

  if (riccati->parsed()) {
    return guarded(err, [&] {
      const auto cfg = load(riccati_flags, Requirements{true, true, true, false, true});
      const auto rep = run_riccati(cfg);
      Json files = Json::array();
      for (const auto& p : rep.written) files.push_back(p.filename().string());
      out << Json{{"value_at_0", rep.value_at_0}, {"naive_cost_at_0", rep.naive_cost_at_0},
                  {"x0", vector_json(cfg.x0)},      {"files", files}}
                 .dump(2)
          << '\n';
      return static_cast<int>(kExitOk);
    });
  }

  if (simulate->parsed()) {
    return guarded(err, [&] {
      const auto cfg = load(simulate_flags, Requirements{true, true, true, true, true});
      const auto rep = run_simulate(cfg);
      Json files = Json::array();
      for (const auto& p : rep.written) files.push_back(p.filename().string());
      out << Json{{"value_at_0", rep.value_at_0},
                  {"optimal_mc_mean", rep.optimal.mean},
                  {"optimal_mc_stderr", rep.optimal.std_error},
                  {"naive_cost_at_0", rep.naive_cost_at_0},
                  {"naive_mc_mean", rep.naive.mean},
                  {"naive_mc_stderr", rep.naive.std_error},
                  {"files", files}}
                 .dump(2)
          << '\n';
      return static_cast<int>(kExitOk);
    });
  }

  if (portfolio->parsed()) {
    return guarded(err, [&] {
      std::vector<std::string> problems;
      preq.model = parse_model(model_json(pfamily, pdrift, prate, pdelta), problems);
      try {
        preq.spec.validate();
      } catch (const ContractError& e) {
        problems.push_back(e.what());
      }
      if (!(preq.x0 > 0.0)) problems.push_back("x0 must be positive");
      if (preq.n_paths < 2) problems.push_back("paths must be at least 2");
      if (!problems.empty()) throw ConfigError(std::move(problems));
      out << to_json(run_portfolio(preq)).dump(2) << '\n';
      return static_cast<int>(kExitOk);
    });
  }

  if (selftest->parsed()) {
    const auto checks = run_selftest();
    bool ok = true;
    for (const auto& c : checks) {
      out << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
      ok = ok && c.passed;
    }
    return ok ? kExitOk : kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace tcc::cli
