#pragma once

// Quadrature and jump sampling for clocks given by a numerically evaluated
// Levy density. Private to the core library.

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "tcc/clock.hpp"

namespace tcc::detail {

inline constexpr double kQuadratureAbsTol = 1e-10;

/// int g(t) lambda(t) dt over the support. The piece below t = 1 is integrated
/// in u = log t, which turns the integrable singularity at the origin allowed
/// by int min{t,1} lambda(dt) < inf into an exponentially decaying tail.
/// Throws NumericalError when the error estimate misses the tolerance.
double integrate_measure(const NumericMeasure& m, const std::function<double(double)>& g,
                         double lo, double hi, double abs_tol = kQuadratureAbsTol);

inline double integrate_measure(const NumericMeasure& m, const std::function<double(double)>& g) {
  return integrate_measure(m, g, m.t_lo, m.t_hi);
}

/// Smallest t such that int_{t_lo}^{t} w(x) lambda(x) dx >= target, by
/// bisection in log t. w must be nonnegative.
double lower_quantile(const NumericMeasure& m, const std::function<double(double)>& w, double target);

/// T such that int_T^{t_hi} exp(rho t) lambda(t) dt <= target (t_hi when finite).
double upper_truncation(const NumericMeasure& m, double rho, double target);

/// Estimate of r_max; +inf for bounded support.
double estimate_r_max(const NumericMeasure& m);

struct NumericMeasureCache {
  double r_max = std::numeric_limits<double>::infinity();
  double total_mass = 0.0;  ///< lambda((t_lo, t_hi)); may be +inf
  double first_moment = std::numeric_limits<double>::quiet_NaN();  ///< NaN when divergent
  std::string first_moment_error;

  // Compound-Poisson sampler: jumps above `cutoff` are drawn exactly from the
  // tabulated normalised measure; the jumps below are replaced by their mean.
  bool sampler_ready = false;
  std::string sampler_error;
  double cutoff = 0.0;
  double effective_drift = 0.0;  ///< b + int_{t_lo}^{cutoff} t lambda(dt)
  double jump_rate = 0.0;        ///< lambda([cutoff, t_upper])
  std::vector<double> grid;      ///< log-spaced nodes on [cutoff, t_upper]
  std::vector<double> cdf;       ///< cumulative mass at each grid node
};

NumericMeasureCache build_cache(const NumericMeasure& m);

/// Draws one jump size from the tabulated measure restricted to [cutoff, t_upper].
double draw_jump(const NumericMeasureCache& cache, double uniform01);

}  // namespace tcc::detail
