#pragma once

/**
 * @file clock.hpp
 * @brief Subordinator clock models.
 *
 * A subordinator tau_s maps controller time s to plant time t. Each model is
 * described by its characteristics (b, lambda): a drift rate b >= 0 and a Levy
 * measure lambda on (0, inf). This header exposes the scalar transforms
 *
 *   psi(z)  = b z + int (1 - exp(-z t)) lambda(dt)     (Laplace exponent)
 *   beta(z) = -psi(-z) = b z + int (exp(z t) - 1) lambda(dt)
 *
 * with E[exp(-z tau_s)] = exp(-s psi(z)) and E[exp(z tau_s)] = exp(s beta(z))
 * for Re z < r_max, together with exact path sampling and the inverse clock
 * zeta_t = inf{sigma : tau_sigma >= t}.
 *
 * Models are immutable after construction and may be shared across threads.
 */

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "tcc/rng.hpp"

namespace tcc {

/// tau_s = b s. No temporal noise when b = 1.
struct Deterministic {
  double b = 1.0;
};

/// Unit-jump Poisson process with rate gamma; characteristics (0, gamma delta_1).
struct Poisson {
  double gamma = 1.0;
};

/// Gamma subordinator: lambda(dt) = delta exp(-gamma t) / t dt.
struct GammaClock {
  double delta = 1.0;
  double gamma = 1.0;
};

/// First passage of gamma t + W_t to level delta s.
struct InverseGaussian {
  double delta = 1.0;
  double gamma = 1.0;
};

/// Drift plus a Levy density given as an evaluable function on (t_lo, t_hi).
/// t_hi may be +infinity. The density is taken to vanish outside the support.
struct NumericMeasure {
  double b = 0.0;
  std::function<double(double)> density;
  double t_lo = 0.0;
  double t_hi = 1.0;
};

namespace detail {
struct NumericMeasureCache;
}

class SubordinatorModel {
 public:
  using Law = std::variant<Deterministic, Poisson, GammaClock, InverseGaussian, NumericMeasure>;

  /// Validates the parameters; throws ContractError on violation.
  explicit SubordinatorModel(Law law);

  static SubordinatorModel deterministic(double b = 1.0) { return SubordinatorModel{Deterministic{b}}; }
  static SubordinatorModel poisson(double gamma) { return SubordinatorModel{Poisson{gamma}}; }
  static SubordinatorModel gamma(double delta, double gamma) {
    return SubordinatorModel{GammaClock{delta, gamma}};
  }
  static SubordinatorModel inverse_gaussian(double delta, double gamma) {
    return SubordinatorModel{InverseGaussian{delta, gamma}};
  }
  static SubordinatorModel numeric(NumericMeasure measure) { return SubordinatorModel{std::move(measure)}; }

  const Law& law() const noexcept { return law_; }

  /// The drift component b of the characteristics.
  double drift() const noexcept;

  /// True when every path is strictly increasing with probability one
  /// (b > 0 or infinite Levy mass). A finite-rate pure-jump clock such as
  /// the Poisson process is not.
  bool strictly_increasing() const noexcept;

  /// Short family name: deterministic, poisson, gamma, inverse_gaussian, numeric.
  std::string family() const;

  const detail::NumericMeasureCache* numeric_cache() const noexcept { return cache_.get(); }

 private:
  Law law_;
  std::shared_ptr<const detail::NumericMeasureCache> cache_;
};

/// psi(z) for real z >= 0.
double laplace_exponent(const SubordinatorModel& model, double z);

/// Abscissa of convergence of int_1^inf exp(r t) lambda(dt); +inf when unbounded.
double r_max(const SubordinatorModel& model);

/// beta(z) for Re z < r_max. Throws DomainError otherwise.
std::complex<double> beta_scalar(const SubordinatorModel& model, std::complex<double> z);

/// Real-argument convenience overload of beta_scalar.
double beta_real(const SubordinatorModel& model, double z);

/// E[tau_1] = b + int t lambda(dt).
double mean_rate(const SubordinatorModel& model);

/// One draw of tau_{ds}.
double sample_increment(const SubordinatorModel& model, double ds, Engine& rng);

struct SubordinatorPath {
  double ds = 0.0;
  double drift = 0.0;          ///< b of the generating model, used to invert drift segments.
  std::vector<double> tau;     ///< tau at s = 0, ds, 2 ds, ...
  std::uint64_t seed = 0;

  double horizon() const noexcept { return ds * static_cast<double>(tau.size() - 1); }
};

/// Exact draws of tau on a uniform controller-time grid of n_steps steps.
SubordinatorPath sample_path(const SubordinatorModel& model, double ds, std::size_t n_steps,
                             std::uint64_t seed);

/// The inverse clock zeta_t on [0, tau_final].
///
/// Within grid interval k the drift part b ds is laid out first, so zeta rises
/// linearly with slope 1/b from k ds, and the jump remainder follows, over
/// which zeta is constant at (k + 1) ds. zeta(tau[k]) == k ds holds exactly
/// at every node whose tau differs from its predecessor's. A tie
/// tau[k] == tau[k - 1] (a Poisson step without jumps, or an increment below
/// the rounding unit) makes zeta(tau[k]) the first tied node's time, as the
/// infimum in the definition requires; such nodes are listed by tied_nodes().
class InverseClockPath {
 public:
  /// Throws ContractError when tau does not start at 0 or decreases.
  explicit InverseClockPath(SubordinatorPath path);

  /// zeta(t); throws ContractError when t lies outside [0, tau_final].
  double operator()(double t) const;

  double t_final() const noexcept { return path_.tau.back(); }
  const SubordinatorPath& path() const noexcept { return path_; }
  /// Nodes k with tau[k] == tau[k - 1].
  const std::vector<std::size_t>& tied_nodes() const noexcept { return tied_; }
  /// True when zeta(tau[k]) == k ds at every node.
  bool exact_inverse() const noexcept { return tied_.empty(); }

 private:
  SubordinatorPath path_;
  std::vector<std::size_t> tied_;
};

InverseClockPath inverse_path(SubordinatorPath path);

}  // namespace tcc
