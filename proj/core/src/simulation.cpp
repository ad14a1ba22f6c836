#include "tcc/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "parallel.hpp"
#include "tcc/csv.hpp"
#include "tcc/error.hpp"
#include "tcc/rng.hpp"

namespace tcc {
namespace {

constexpr std::uint64_t kClockStream = 0x636c6f636bULL;      // "clock"
constexpr std::uint64_t kDiffusionStream = 0x6469666675ULL;  // "diffu"

Vector standard_normal(Index size, Engine& rng) {
  std::normal_distribution<double> normal;
  Vector out(size);
  for (Index i = 0; i < size; ++i) out(i) = normal(rng);
  return out;
}

// Exact law of Y_t for dY = (AY + Bu) dt + M dW, Y_0 = x: the mean
// exp(At) x + int_0^t exp(Ar) dr Bu and a square root of the covariance
// int_0^t exp(Ar) MM' exp(A'r) dr (Van Loan's block exponential).
struct GaussianTransition {
  Vector mean;
  Matrix cov_root;
};

GaussianTransition exact_transition(const LinearPlant& plant, const Vector& x, const Vector& u, double t) {
  const Index n = plant.states();
  Matrix drift_block = Matrix::Zero(2 * n, 2 * n);
  drift_block.topLeftCorner(n, n) = plant.A;
  drift_block.topRightCorner(n, n) = Matrix::Identity(n, n);
  const Matrix e_drift = mat_exp(drift_block * t);
  GaussianTransition out;
  out.mean = e_drift.topLeftCorner(n, n) * x + e_drift.topRightCorner(n, n) * (plant.B * u);

  const Matrix mmt = plant.M * plant.M.transpose();
  if (mmt.cwiseAbs().maxCoeff() == 0.0 || t == 0.0) {
    out.cov_root = Matrix::Zero(n, n);
    return out;
  }
  Matrix van_loan = Matrix::Zero(2 * n, 2 * n);
  van_loan.topLeftCorner(n, n) = -plant.A;
  van_loan.topRightCorner(n, n) = mmt;
  van_loan.bottomRightCorner(n, n) = plant.A.transpose();
  const Matrix e_vl = mat_exp(van_loan * t);
  Matrix cov = e_vl.bottomRightCorner(n, n).transpose() * e_vl.topRightCorner(n, n);
  cov = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  out.cov_root = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  return out;
}

}  // namespace

void SimConfig::validate(double S) const {
  std::vector<std::string> problems;
  if (!(ds > 0.0) || !std::isfinite(ds)) {
    problems.emplace_back("ds must be finite and > 0");
  } else {
    const double ratio = S / ds;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio) || std::round(ratio) < 1.0) {
      problems.emplace_back("ds must divide the horizon S");
    }
  }
  if (substeps < 1) problems.emplace_back("substeps must be >= 1");
  if (n_paths < 1) problems.emplace_back("n_paths must be >= 1");
  if (!(max_plant_step > 0.0)) problems.emplace_back("max_plant_step must be > 0");
  if (!problems.empty()) {
    std::ostringstream os;
    os << "invalid simulation config:";
    for (const auto& p : problems) os << "\n  - " << p;
    throw ContractError(os.str());
  }
}

std::size_t SimConfig::steps(double S) const { return static_cast<std::size_t>(std::llround(S / ds)); }

PathSeeds path_seeds(std::uint64_t master, std::size_t path, std::uint64_t diffusion_stream) {
  return {derive_seed(master, kClockStream, path), derive_seed(master ^ splitmix64(diffusion_stream), kDiffusionStream, path)};
}

TrajectoryRecord simulate_trajectory(const SubordinatorModel& model, const LinearPlant& plant,
                                     const QuadraticCost& cost, const GainSchedule& gains, const Vector& x0,
                                     const SimConfig& cfg, PathSeeds seeds) {
  cfg.validate(cost.S);
  if (x0.size() != plant.states()) throw ContractError("initial state has the wrong dimension");
  const std::size_t n_steps = cfg.steps(cost.S);
  const Index w = plant.M.cols();
  const bool noisy = w > 0 && plant.M.cwiseAbs().maxCoeff() > 0.0;

  Engine clock_rng(seeds.clock);
  Engine diffusion_rng(seeds.diffusion);

  TrajectoryRecord rec;
  rec.s.resize(n_steps + 1);
  rec.tau.resize(n_steps + 1);
  rec.X.resize(n_steps + 1);
  rec.U.resize(n_steps);
  rec.running_cost.resize(n_steps + 1);
  rec.s[0] = 0.0;
  rec.tau[0] = 0.0;
  rec.X[0] = x0;
  rec.running_cost[0] = 0.0;

  Vector y = x0;
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double s = static_cast<double>(k) * cfg.ds;
    const Vector u = gains(s) * rec.X[k];
    const double dtau = sample_increment(model, cfg.ds, clock_rng);
    const auto m = std::max<std::size_t>(cfg.substeps, static_cast<std::size_t>(std::ceil(dtau / cfg.max_plant_step)));
    const double h = dtau / static_cast<double>(m);
    const Vector bu = plant.B * u;
    if (h > 0.0) {
      const double sqrt_h = std::sqrt(h);
      for (std::size_t j = 0; j < m; ++j) {
        Vector next = y + h * (plant.A * y + bu);
        if (noisy) next += sqrt_h * (plant.M * standard_normal(w, diffusion_rng));
        y = std::move(next);
      }
    }
    if (!y.allFinite()) {
      std::ostringstream os;
      os << "state diverged at s = " << s + cfg.ds << " (clock seed " << seeds.clock << ")";
      throw DivergenceError(os.str(), s + cfg.ds);
    }
    rec.s[k + 1] = static_cast<double>(k + 1) * cfg.ds;
    rec.tau[k + 1] = rec.tau[k] + dtau;
    rec.X[k + 1] = y;
    rec.U[k] = u;
    // Trapezoid in s of X'QX + U'RU, where the right end uses the input the
    // policy would apply at s_{k+1}. A clock jump inside the step lands at a
    // uniform position, so this is first-order unbiased for the jump timing.
    const Vector u_next = gains(rec.s[k + 1]) * y;
    const double left = rec.X[k].dot(cost.Q * rec.X[k]) + u.dot(cost.R * u);
    const double right = y.dot(cost.Q * y) + u_next.dot(cost.R * u_next);
    rec.running_cost[k + 1] = rec.running_cost[k] + 0.5 * cfg.ds * (left + right);
  }
  rec.cost = rec.running_cost.back() + y.dot(cost.Phi * y);
  return rec;
}

MCSummary MCSummary::from_samples(std::vector<double> samples) {
  MCSummary out;
  out.n_paths = samples.size();
  if (!samples.empty()) {
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(samples.size());
    out.mean = mean;
    out.std_error = samples.size() > 1 ? std::sqrt(sample_variance(samples) / static_cast<double>(samples.size())) : 0.0;
  }
  out.samples = std::move(samples);
  return out;
}

double sample_variance(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(values.size() - 1);
}

MCSummary estimate_cost(const SubordinatorModel& model, const LinearPlant& plant, const QuadraticCost& cost,
                        const GainSchedule& gains, const Vector& x0, const SimConfig& cfg,
                        std::uint64_t diffusion_stream) {
  cfg.validate(cost.S);
  const std::size_t n = cfg.n_paths;
  std::vector<double> costs(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<Vector> terminal(n);
  std::vector<char> failed(n, 0);
  detail::parallel_for(n, cfg.threads, [&](std::size_t i) {
    try {
      auto rec = simulate_trajectory(model, plant, cost, gains, x0, cfg, path_seeds(cfg.seed, i, diffusion_stream));
      costs[i] = rec.cost;
      terminal[i] = std::move(rec.X.back());
    } catch (const DivergenceError&) {
      failed[i] = 1;
    }
  });

  std::vector<double> kept;
  std::vector<Vector> kept_terminal;
  kept.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (failed[i]) continue;
    kept.push_back(costs[i]);
    kept_terminal.push_back(std::move(terminal[i]));
  }
  const std::size_t n_failed = n - kept.size();
  MCSummary out = MCSummary::from_samples(std::move(kept));
  out.n_failed = n_failed;
  out.terminal_states = std::move(kept_terminal);
  return out;
}

DynkinResult dynkin_check(const SubordinatorModel& model, const TimeChangedMappings& maps, const LinearPlant& plant,
                          const QuadraticValue& value, std::size_t node, std::size_t delta_nodes, const Vector& x,
                          const Vector& u, std::size_t n_paths, std::uint64_t seed, unsigned threads) {
  if (delta_nodes < 1 || node + delta_nodes >= value.s.size()) {
    throw ContractError("dynkin_check needs node + delta_nodes inside the value grid");
  }
  if (n_paths < 2) throw ContractError("dynkin_check needs at least 2 paths");
  const double delta = value.s[node + delta_nodes] - value.s[node];
  const double v_now = value.at(node, x);
  const std::size_t next_node = node + delta_nodes;

  std::vector<double> quotients(n_paths);
  detail::parallel_for(n_paths, threads, [&](std::size_t i) {
    const auto seeds = path_seeds(seed, i);
    Engine clock_rng(seeds.clock);
    Engine diffusion_rng(seeds.diffusion);
    const double dtau = sample_increment(model, delta, clock_rng);
    const auto tr = exact_transition(plant, x, u, dtau);
    const Vector y = tr.mean + tr.cov_root * standard_normal(plant.states(), diffusion_rng);
    quotients[i] = (value.at(next_node, y) - v_now) / delta;
  });

  const auto summary = MCSummary::from_samples(std::move(quotients));
  DynkinResult out;
  out.empirical = summary.mean;
  out.std_error = summary.std_error;
  out.predicted = quadratic_generator(maps, plant, value, node, x, u);
  const double diff = out.empirical - out.predicted;
  if (out.std_error > 0.0) {
    out.z_score = diff / out.std_error;
  } else {
    out.z_score = std::abs(diff) <= 1e-9 * std::max(1.0, std::abs(out.predicted)) ? 0.0
                                                                                   : std::numeric_limits<double>::infinity();
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const std::vector<LabeledTrajectory>& paths, const std::string& metadata) {
  write_csv_comment(os, metadata);
  if (paths.empty()) return;
  const Index n = paths.front().record->X.front().size();
  const Index p = paths.front().record->U.empty() ? 0 : paths.front().record->U.front().size();
  std::vector<std::string> header{"policy", "path", "s", "tau"};
  for (Index i = 0; i < n; ++i) header.push_back("X_" + std::to_string(i));
  for (Index i = 0; i < p; ++i) header.push_back("U_" + std::to_string(i));
  header.emplace_back("running_cost");
  write_csv_header(os, header);
  for (const auto& lp : paths) {
    const auto& rec = *lp.record;
    for (std::size_t k = 0; k < rec.s.size(); ++k) {
      os << lp.policy << ',' << lp.path << ',' << format_double(rec.s[k]) << ',' << format_double(rec.tau[k]);
      for (Index i = 0; i < n; ++i) os << ',' << format_double(rec.X[k](i));
      for (Index i = 0; i < p; ++i) os << ',' << (k < rec.U.size() ? format_double(rec.U[k](i)) : std::string("nan"));
      os << ',' << format_double(rec.running_cost[k]) << '\n';
    }
  }
}

void write_histogram_csv(std::ostream& os, const std::vector<std::pair<std::string, std::vector<double>>>& series,
                         std::size_t bins, const std::string& metadata) {
  if (bins < 1) throw ContractError("histogram needs at least one bin");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& [name, values] : series) {
    for (double v : values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(lo <= hi)) lo = hi = 0.0;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<std::vector<double>> counts(series.size(), std::vector<double>(bins, 0.0));
  for (std::size_t j = 0; j < series.size(); ++j) {
    for (double v : series[j].second) {
      auto b = static_cast<std::size_t>((v - lo) / width);
      counts[j][std::min(b, bins - 1)] += 1.0;
    }
  }
  write_csv_comment(os, metadata);
  std::vector<std::string> header{"bin_lo", "bin_hi"};
  for (const auto& s : series) header.push_back(s.first);
  write_csv_header(os, header);
  for (std::size_t b = 0; b < bins; ++b) {
    std::vector<double> row{lo + width * static_cast<double>(b), lo + width * static_cast<double>(b + 1)};
    for (const auto& c : counts) row.push_back(c[b]);
    write_csv_row(os, row);
  }
}

}  // namespace tcc
