#include "tcc/lqr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "tcc/csv.hpp"

namespace tcc {
namespace {

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

bool is_symmetric(const Matrix& m, double rel_tol = 1e-12) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

double min_symmetric_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

std::string shape(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

void throw_if_any(const std::vector<std::string>& problems, const char* what) {
  if (problems.empty()) return;
  std::ostringstream os;
  os << what << ":";
  for (const auto& p : problems) os << "\n  - " << p;
  throw ContractError(os.str());
}

// Fourth-order finite difference of samples f on a uniform grid of step h.
template <class T>
T grid_derivative(const std::vector<T>& f, std::size_t i, double h) {
  const std::size_t last = f.size() - 1;
  if (f.size() < 5) throw ContractError("finite-difference derivative needs at least 5 grid nodes");
  const double c = 1.0 / (12.0 * h);
  if (i >= 2 && i + 2 <= last) return T(c * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]));
  if (i == 0) return T(c * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]));
  if (i == 1) return T(c * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]));
  if (i == last) {
    return T(-c * (-25.0 * f[last] + 48.0 * f[last - 1] - 36.0 * f[last - 2] + 16.0 * f[last - 3] - 3.0 * f[last - 4]));
  }
  return T(-c * (-3.0 * f[last] - 10.0 * f[last - 1] + 18.0 * f[last - 2] - 6.0 * f[last - 3] + f[last - 4]));
}

// (R + B'H(P)B)^{-1} B'G(P)', i.e. -K.
Matrix negative_gain(const TimeChangedMappings::Blocks& blk, const Matrix& B, const Matrix& R, double s) {
  const Matrix weight = symmetrize(R + B.transpose() * blk.H * B);
  if (!weight.allFinite()) throw DivergenceError("non-finite input weight R + B'HB", s);
  Eigen::JacobiSVD<Matrix> svd(weight);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  if (!(cond <= 1e12)) {
    std::ostringstream os;
    os << "R + B'H(P)B is numerically singular (condition " << cond << ") at s = " << s;
    throw SolverError(os.str(), s);
  }
  return weight.ldlt().solve(B.transpose() * blk.G.transpose());
}

void check_finite(const Matrix& m, double h, double s, const char* what) {
  if (!m.allFinite() || !std::isfinite(h)) {
    std::ostringstream os;
    os << what << " diverged (NaN or overflow) at s = " << s;
    throw DivergenceError(os.str(), s);
  }
}

std::vector<double> uniform_grid(double S, std::size_t n_steps) {
  if (n_steps < 10) throw ContractError("Riccati solvers need n_steps >= 10");
  std::vector<double> s(n_steps + 1);
  for (std::size_t k = 0; k <= n_steps; ++k) s[k] = S * static_cast<double>(k) / static_cast<double>(n_steps);
  s.back() = S;
  return s;
}

}  // namespace

void LinearPlant::validate() const {
  std::vector<std::string> problems;
  if (A.rows() < 1 || A.rows() != A.cols()) problems.push_back("A must be square and non-empty, got " + shape(A));
  if (B.rows() != A.rows() || B.cols() < 1) problems.push_back("B must be n x p with p >= 1, got " + shape(B));
  if (M.rows() != A.rows()) problems.push_back("M must have n rows, got " + shape(M));
  if (!A.allFinite() || !B.allFinite() || !M.allFinite()) problems.push_back("plant matrices must be finite");
  throw_if_any(problems, "invalid plant");
}

void QuadraticCost::validate(const LinearPlant& plant) const {
  std::vector<std::string> problems;
  const Index n = plant.states();
  const Index p = plant.inputs();
  auto check_psd = [&](const Matrix& m, const char* name, Index dim) {
    if (m.rows() != dim || m.cols() != dim) {
      problems.push_back(std::string(name) + " must be " + std::to_string(dim) + "x" + std::to_string(dim) +
                         ", got " + shape(m));
      return false;
    }
    if (!m.allFinite()) {
      problems.push_back(std::string(name) + " must be finite");
      return false;
    }
    if (!is_symmetric(m)) {
      problems.push_back(std::string(name) + " must be symmetric");
      return false;
    }
    return true;
  };
  if (check_psd(Q, "Q", n) && min_symmetric_eigenvalue(Q) < -1e-12 * std::max(1.0, Q.norm())) {
    problems.push_back("Q must be positive semidefinite");
  }
  if (check_psd(Phi, "Phi", n) && min_symmetric_eigenvalue(Phi) < -1e-12 * std::max(1.0, Phi.norm())) {
    problems.push_back("Phi must be positive semidefinite");
  }
  if (check_psd(R, "R", p) && !(min_symmetric_eigenvalue(R) > 0.0)) problems.push_back("R must be positive definite");
  if (!(S > 0.0) || !std::isfinite(S)) problems.push_back("horizon S must be finite and > 0");
  throw_if_any(problems, "invalid cost");
}

AugmentedMatrices build_augmented(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() < 1) throw ContractError("build_augmented requires a square matrix");
  const Index n = a.rows();
  AugmentedMatrices out;
  out.tilde = Matrix::Zero(2 * n, 2 * n);
  out.tilde.topLeftCorner(n, n) = a;
  out.tilde.topRightCorner(n, n) = Matrix::Identity(n, n);
  const Index n2 = n * n;
  out.hat = Matrix::Zero(2 * n2, 2 * n2);
  out.hat.topLeftCorner(n2, n2) = kron_sum(a, a);
  out.hat.topRightCorner(n2, n2) = Matrix::Identity(n2, n2);
  return out;
}

TimeChangedMappings::TimeChangedMappings(const SubordinatorModel& model, const LinearPlant& plant) {
  plant.validate();
  n_ = plant.states();
  auto report = spectrum_check(model, plant.A, 2.0);
  if (!report.passes) {
    std::ostringstream os;
    os << "{0} u spec(2A) leaves dom(beta) for the " << model.family() << " clock: max Re = " << report.max_real_part
       << ", r_max = " << report.r_max;
    throw SpectrumDomainError(os.str(), std::move(report));
  }

  const auto aug = build_augmented(plant.A);
  const Matrix at = aug.tilde.transpose();
  const Matrix beta_full = beta_matrix(model, kron_sum(at, at));
  const Index two_n = 2 * n_;
  beta_columns_.resize(beta_full.rows(), n_ * n_);
  for (Index j = 0; j < n_; ++j) {
    for (Index i = 0; i < n_; ++i) beta_columns_.col(j * n_ + i) = beta_full.col(j * two_n + i);
  }

  const Matrix mmt = plant.M * plant.M.transpose();
  if (mmt.cwiseAbs().maxCoeff() == 0.0) {
    noise_ = Matrix::Zero(n_, n_);
  } else {
    const Index n2 = n_ * n_;
    const Matrix beta_hat = beta_matrix(model, aug.hat);
    noise_ = unvec(beta_hat.topRightCorner(n2, n2) * vec(mmt), n_, n_);
  }
}

TimeChangedMappings::Blocks TimeChangedMappings::blocks(const Matrix& p) const {
  if (p.rows() != n_ || p.cols() != n_) throw ContractError("mapping argument P must be n x n, got " + shape(p));
  const Matrix w = unvec(beta_columns_ * vec(p), 2 * n_, 2 * n_);
  return {w.topLeftCorner(n_, n_), w.topRightCorner(n_, n_), w.bottomRightCorner(n_, n_)};
}

MappingSet TimeChangedMappings::operator()(const Matrix& p) const {
  if (!is_symmetric(p)) throw ContractError("compute_mappings requires a symmetric P");
  auto blk = blocks(p);
  return {std::move(blk.F), std::move(blk.G), std::move(blk.H), g(p), noise_};
}

MappingSet compute_mappings(const SubordinatorModel& model, const LinearPlant& plant, const Matrix& p) {
  return TimeChangedMappings(model, plant)(p);
}

GainSchedule::GainSchedule(std::vector<double> s, std::vector<Matrix> gains) : s_(std::move(s)), gains_(std::move(gains)) {
  if (s_.empty() || s_.size() != gains_.size()) throw ContractError("gain schedule needs one gain per grid node");
  if (!std::is_sorted(s_.begin(), s_.end())) throw ContractError("gain schedule grid must be increasing");
}

GainSchedule GainSchedule::constant(const Matrix& gain, double S) { return GainSchedule({0.0, S}, {gain, gain}); }

Matrix GainSchedule::operator()(double s) const {
  if (s_.size() == 1 || s <= s_.front()) return gains_.front();
  if (s >= s_.back()) return gains_.back();
  const auto it = std::upper_bound(s_.begin(), s_.end(), s);
  const auto k = static_cast<std::size_t>(it - s_.begin()) - 1;
  const double w = (s - s_[k]) / (s_[k + 1] - s_[k]);
  return (1.0 - w) * gains_[k] + w * gains_[k + 1];
}

std::size_t QuadraticValue::node_of(double s_value) const {
  const double h = step();
  const double k = std::round((s_value - s.front()) / h);
  if (k < 0 || k > static_cast<double>(s.size() - 1) || std::abs(s[static_cast<std::size_t>(k)] - s_value) > 1e-9 * h) {
    throw ContractError("s = " + std::to_string(s_value) + " is not a node of the solution grid");
  }
  return static_cast<std::size_t>(k);
}

Matrix QuadraticValue::P_derivative(std::size_t node) const { return grid_derivative(P, node, step()); }
double QuadraticValue::h_derivative(std::size_t node) const { return grid_derivative(h, node, step()); }

RiccatiSolution solve_riccati(const TimeChangedMappings& maps, const LinearPlant& plant, const QuadraticCost& cost,
                              std::size_t n_steps) {
  cost.validate(plant);
  if (maps.states() != plant.states()) throw ContractError("mappings were built for a different plant");
  const Matrix& B = plant.B;

  RiccatiSolution sol;
  sol.s = uniform_grid(cost.S, n_steps);
  sol.P.resize(n_steps + 1);
  sol.h.resize(n_steps + 1);
  sol.K.resize(n_steps + 1);

  // Right-hand side in remaining time r = S - s: dP/dr = Q + F - G B W^{-1} B'G'.
  auto rhs = [&](const Matrix& p, double s) -> Matrix {
    const auto blk = maps.blocks(p);
    const Matrix wbg = negative_gain(blk, B, cost.R, s);
    return symmetrize(cost.Q + blk.F - blk.G * B * wbg);
  };

  const double dt = cost.S / static_cast<double>(n_steps);
  Matrix p = symmetrize(cost.Phi);
  double h = 0.0;
  sol.P[n_steps] = p;
  sol.h[n_steps] = h;
  for (std::size_t k = n_steps; k > 0; --k) {
    const double s = sol.s[k];
    const Matrix k1 = rhs(p, s);
    const Matrix p2 = symmetrize(p + 0.5 * dt * k1);
    const Matrix k2 = rhs(p2, s - 0.5 * dt);
    const Matrix p3 = symmetrize(p + 0.5 * dt * k2);
    const Matrix k3 = rhs(p3, s - 0.5 * dt);
    const Matrix p4 = symmetrize(p + dt * k3);
    const Matrix k4 = rhs(p4, s - dt);
    h += dt / 6.0 * (maps.g(p) + 2.0 * maps.g(p2) + 2.0 * maps.g(p3) + maps.g(p4));
    p = symmetrize(p + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    check_finite(p, h, sol.s[k - 1], "Riccati solution");
    sol.P[k - 1] = p;
    sol.h[k - 1] = h;
  }
  for (std::size_t k = 0; k <= n_steps; ++k) sol.K[k] = -negative_gain(maps.blocks(sol.P[k]), B, cost.R, sol.s[k]);
  return sol;
}

RiccatiSolution solve_riccati(const SubordinatorModel& model, const LinearPlant& plant, const QuadraticCost& cost,
                              std::size_t n_steps) {
  return solve_riccati(TimeChangedMappings(model, plant), plant, cost, n_steps);
}

PolicyCostSolution policy_cost(const TimeChangedMappings& maps, const LinearPlant& plant, const QuadraticCost& cost,
                               const GainSchedule& gains, std::size_t n_steps) {
  cost.validate(plant);
  if (maps.states() != plant.states()) throw ContractError("mappings were built for a different plant");
  const Matrix& B = plant.B;

  PolicyCostSolution sol;
  sol.s = uniform_grid(cost.S, n_steps);
  sol.P.resize(n_steps + 1);
  sol.h.resize(n_steps + 1);

  auto rhs = [&](const Matrix& z, double s) -> Matrix {
    const Matrix L = gains(s);
    if (L.rows() != plant.inputs() || L.cols() != plant.states()) {
      throw ContractError("policy gain must be p x n, got " + shape(L));
    }
    const auto blk = maps.blocks(z);
    const Matrix cross = blk.G * B * L;
    return symmetrize(cost.Q + blk.F + cross + cross.transpose() + L.transpose() * (cost.R + B.transpose() * blk.H * B) * L);
  };

  const double dt = cost.S / static_cast<double>(n_steps);
  Matrix z = symmetrize(cost.Phi);
  double p = 0.0;
  sol.P[n_steps] = z;
  sol.h[n_steps] = p;
  for (std::size_t k = n_steps; k > 0; --k) {
    const double s = sol.s[k];
    const Matrix k1 = rhs(z, s);
    const Matrix z2 = symmetrize(z + 0.5 * dt * k1);
    const Matrix k2 = rhs(z2, s - 0.5 * dt);
    const Matrix z3 = symmetrize(z + 0.5 * dt * k2);
    const Matrix k3 = rhs(z3, s - 0.5 * dt);
    const Matrix z4 = symmetrize(z + dt * k3);
    const Matrix k4 = rhs(z4, s - dt);
    p += dt / 6.0 * (maps.g(z) + 2.0 * maps.g(z2) + 2.0 * maps.g(z3) + maps.g(z4));
    z = symmetrize(z + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    check_finite(z, p, sol.s[k - 1], "policy cost-to-go");
    sol.P[k - 1] = z;
    sol.h[k - 1] = p;
  }
  return sol;
}

PolicyCostSolution policy_cost(const SubordinatorModel& model, const LinearPlant& plant, const QuadraticCost& cost,
                               const GainSchedule& gains, std::size_t n_steps) {
  return policy_cost(TimeChangedMappings(model, plant), plant, cost, gains, n_steps);
}

GainSchedule classical_lqr(const LinearPlant& plant, const QuadraticCost& cost, std::size_t n_steps) {
  return solve_riccati(SubordinatorModel::deterministic(1.0), plant, cost, n_steps).gain_schedule();
}

double quadratic_generator(const TimeChangedMappings& maps, const LinearPlant& plant, const QuadraticValue& value,
                           std::size_t node, const Vector& x, const Vector& u) {
  const Matrix& p = value.P[node];
  const auto blk = maps.blocks(p);
  const Vector bu = plant.B * u;
  return x.dot((value.P_derivative(node) + blk.F) * x) + 2.0 * x.dot(blk.G * bu) + bu.dot(blk.H * bu) +
         value.h_derivative(node) + maps.g(p);
}

double bellman_residual(const TimeChangedMappings& maps, const LinearPlant& plant, const QuadraticCost& cost,
                        const RiccatiSolution& sol, std::size_t node, const Vector& x, const Vector& u) {
  return x.dot(cost.Q * x) + u.dot(cost.R * u) + quadratic_generator(maps, plant, sol, node, x, u);
}

void write_riccati_csv(std::ostream& os, const RiccatiSolution& sol, const std::string& metadata) {
  write_csv_comment(os, metadata);
  const Index n = sol.P.front().rows();
  const Index p = sol.K.front().rows();
  std::vector<std::string> header{"s"};
  for (auto& name : vec_column_names("P", n, n)) header.push_back(std::move(name));
  header.emplace_back("h");
  for (auto& name : vec_column_names("K", p, n)) header.push_back(std::move(name));
  write_csv_header(os, header);
  std::vector<double> row;
  for (std::size_t k = 0; k < sol.s.size(); ++k) {
    row.assign({sol.s[k]});
    const Vector vp = vec(sol.P[k]);
    row.insert(row.end(), vp.data(), vp.data() + vp.size());
    row.push_back(sol.h[k]);
    const Vector vk = vec(sol.K[k]);
    row.insert(row.end(), vk.data(), vk.data() + vk.size());
    write_csv_row(os, row);
  }
}

void write_policy_cost_csv(std::ostream& os, const PolicyCostSolution& sol, const GainSchedule& gains,
                           const std::string& metadata) {
  write_csv_comment(os, metadata);
  const Index n = sol.P.front().rows();
  const Matrix l0 = gains(sol.s.front());
  std::vector<std::string> header{"s"};
  for (auto& name : vec_column_names("Z", n, n)) header.push_back(std::move(name));
  header.emplace_back("p");
  for (auto& name : vec_column_names("L", l0.rows(), l0.cols())) header.push_back(std::move(name));
  write_csv_header(os, header);
  std::vector<double> row;
  for (std::size_t k = 0; k < sol.s.size(); ++k) {
    row.assign({sol.s[k]});
    const Vector vz = vec(sol.P[k]);
    row.insert(row.end(), vz.data(), vz.data() + vz.size());
    row.push_back(sol.h[k]);
    const Vector vl = vec(gains(sol.s[k]));
    row.insert(row.end(), vl.data(), vl.data() + vl.size());
    write_csv_row(os, row);
  }
}

}  // namespace tcc
