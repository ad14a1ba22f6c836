#pragma once

/**
 * @file lqr.hpp
 * @brief Linear-quadratic regulation under a subordinator clock.
 *
 * The plant dY_t = (A Y_t + B U(zeta_t)) dt + M dW_t is observed and
 * controlled on the controller clock, X_s = Y(tau_s). For a quadratic value
 * function V(s, x) = x' P_s x + h_s the clock enters only through four linear
 * maps of P:
 *
 *   F(P) = b (A'P + PA) + int (exp(A't) P exp(At) - P) lambda(dt)
 *   G(P) = b P + int exp(A't) P Gamma(t) lambda(dt),     Gamma(t) = int_0^t exp(Ar) dr
 *   H(P) = int Gamma(t)' P Gamma(t) lambda(dt)
 *   g(P) = tr(P N),  N = b MM' + int int_0^t exp(Ar) MM' exp(A'r) dr lambda(dt)
 *
 * All of them are read off one matrix function: with Z = [P 0; 0 0] and
 * At = [A I; 0 0],
 *
 *   vec([F G; G' H]) = beta(At' (+) At') vec(Z),
 *
 * and vec(N) = [I 0] beta([A (+) A, I; 0, 0]) [0; I] vec(MM').
 * TimeChangedMappings evaluates both matrix functions once and caches them.
 */

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "tcc/clock.hpp"
#include "tcc/matrix.hpp"

namespace tcc {

struct LinearPlant {
  Matrix A;  ///< n x n
  Matrix B;  ///< n x p
  Matrix M;  ///< n x w

  Index states() const noexcept { return A.rows(); }
  Index inputs() const noexcept { return B.cols(); }
  void validate() const;
};

struct QuadraticCost {
  Matrix Q;    ///< n x n, symmetric PSD
  Matrix R;    ///< p x p, symmetric PD
  Matrix Phi;  ///< n x n, symmetric PSD
  double S = 1.0;

  void validate(const LinearPlant& plant) const;
};

struct AugmentedMatrices {
  Matrix tilde;  ///< [A I; 0 0], 2n x 2n
  Matrix hat;    ///< [A (+) A, I; 0 0], 2n^2 x 2n^2
};

AugmentedMatrices build_augmented(const Matrix& a);

struct MappingSet {
  Matrix FP;
  Matrix GP;
  Matrix HP;
  double gP = 0.0;
  Matrix noise;  ///< N, with g(P) = tr(P N)
};

/// F, G, H, g for one (clock, plant) pair. Immutable after construction.
class TimeChangedMappings {
 public:
  /// Throws SpectrumDomainError unless {0} u spec(2A) lies inside dom(beta).
  TimeChangedMappings(const SubordinatorModel& model, const LinearPlant& plant);

  struct Blocks {
    Matrix F;
    Matrix G;
    Matrix H;
  };

  /// F(P), G(P), H(P) without the symmetry check of operator().
  Blocks blocks(const Matrix& p) const;
  double g(const Matrix& p) const { return (p * noise_).trace(); }

  /// Throws ContractError when P is not symmetric.
  MappingSet operator()(const Matrix& p) const;

  const Matrix& noise_matrix() const noexcept { return noise_; }
  Index states() const noexcept { return n_; }

 private:
  Index n_ = 0;
  Matrix beta_columns_;  ///< columns of beta(At' (+) At') hit by vec([P 0; 0 0])
  Matrix noise_;
};

MappingSet compute_mappings(const SubordinatorModel& model, const LinearPlant& plant, const Matrix& p);

/// Linear policy gains L_s on a grid, interpolated piecewise-linearly in s.
class GainSchedule {
 public:
  GainSchedule() = default;
  GainSchedule(std::vector<double> s, std::vector<Matrix> gains);

  /// The same gain over [0, S].
  static GainSchedule constant(const Matrix& gain, double S);

  Matrix operator()(double s) const;
  const std::vector<double>& grid() const noexcept { return s_; }
  const std::vector<Matrix>& gains() const noexcept { return gains_; }

 private:
  std::vector<double> s_;
  std::vector<Matrix> gains_;
};

/// x' P_s x + h_s stored on a uniform grid.
struct QuadraticValue {
  std::vector<double> s;
  std::vector<Matrix> P;
  std::vector<double> h;

  double at(std::size_t node, const Vector& x) const { return x.dot(P[node] * x) + h[node]; }
  double step() const noexcept { return s.size() > 1 ? s[1] - s[0] : 0.0; }
  std::size_t node_of(double s_value) const;

  /// d/ds of P and h at a node by fourth-order finite differences.
  Matrix P_derivative(std::size_t node) const;
  double h_derivative(std::size_t node) const;
};

struct RiccatiSolution : QuadraticValue {
  std::vector<Matrix> K;  ///< optimal gains, U_s = K_s X_{s-}

  GainSchedule gain_schedule() const { return {s, K}; }
};

struct PolicyCostSolution : QuadraticValue {
  const std::vector<Matrix>& Z() const noexcept { return P; }
  const std::vector<double>& p() const noexcept { return h; }
};

inline constexpr std::size_t kDefaultRiccatiSteps = 1000;

/// Backward RK4 for -dP/ds = Q + F(P) - G(P) B (R + B'H(P)B)^{-1} B'G(P)', -dh/ds = g(P).
RiccatiSolution solve_riccati(const TimeChangedMappings& maps, const LinearPlant& plant, const QuadraticCost& cost,
                              std::size_t n_steps = kDefaultRiccatiSteps);
RiccatiSolution solve_riccati(const SubordinatorModel& model, const LinearPlant& plant, const QuadraticCost& cost,
                              std::size_t n_steps = kDefaultRiccatiSteps);

/// Cost-to-go x' Z_s x + p_s of the linear policy U_s = L_s X_{s-}.
PolicyCostSolution policy_cost(const TimeChangedMappings& maps, const LinearPlant& plant, const QuadraticCost& cost,
                               const GainSchedule& gains, std::size_t n_steps = kDefaultRiccatiSteps);
PolicyCostSolution policy_cost(const SubordinatorModel& model, const LinearPlant& plant, const QuadraticCost& cost,
                               const GainSchedule& gains, std::size_t n_steps = kDefaultRiccatiSteps);

/// Finite-horizon LQR gains that ignore clock noise.
GainSchedule classical_lqr(const LinearPlant& plant, const QuadraticCost& cost,
                           std::size_t n_steps = kDefaultRiccatiSteps);

/// A^u V(s, x) for quadratic V at a grid node, from the closed quadratic form
/// [x;u]'[dP/ds + F(P), G(P)B; B'G(P)', B'H(P)B][x;u] + dh/ds + g(P).
double quadratic_generator(const TimeChangedMappings& maps, const LinearPlant& plant, const QuadraticValue& value,
                           std::size_t node, const Vector& x, const Vector& u);

/// c(s, x, u) + A^u V(s, x). Vanishes at u = K_s x up to integration error
/// and is convex in u.
double bellman_residual(const TimeChangedMappings& maps, const LinearPlant& plant, const QuadraticCost& cost,
                        const RiccatiSolution& sol, std::size_t node, const Vector& x, const Vector& u);

/// CSV with columns s, vec(P_s), h_s, vec(K_s).
void write_riccati_csv(std::ostream& os, const RiccatiSolution& sol, const std::string& metadata = {});

/// CSV with columns s, vec(Z_s), p_s, vec(L_s).
void write_policy_cost_csv(std::ostream& os, const PolicyCostSolution& sol, const GainSchedule& gains,
                           const std::string& metadata = {});

}  // namespace tcc
