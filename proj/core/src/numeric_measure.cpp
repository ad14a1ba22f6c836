#include "numeric_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tcc/error.hpp"

namespace tcc::detail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr unsigned kMaxDepth = 22;
constexpr double kRelTol = 1e-13;
constexpr double kTinyT = 1e-300;
constexpr double kLogFloor = 1e-150;

using GaussKronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

double checked_gk(const std::function<double(double)>& f, double a, double b, double abs_tol) {
  double error = 0.0;
  double l1 = 0.0;
  const double value = GaussKronrod::integrate(f, a, b, kMaxDepth, kRelTol, &error, &l1);
  if (!std::isfinite(value) || !(error <= std::max(abs_tol, 1e-10 * l1))) {
    throw NumericalError("Levy-measure quadrature did not converge on (" + std::to_string(a) + ", " +
                         std::to_string(b) + "): error estimate " + std::to_string(error));
  }
  return value;
}

}  // namespace

double integrate_measure(const NumericMeasure& m, const std::function<double(double)>& g, double lo,
                         double hi, double abs_tol) {
  lo = std::max(lo, m.t_lo);
  hi = std::min(hi, m.t_hi);
  if (!(lo < hi)) return 0.0;

  double total = 0.0;
  if (lo < 1.0) {
    const double a = lo > 0.0 ? std::log(lo) : -kInf;
    const double b = std::log(std::min(hi, 1.0));
    auto in_log = [&](double u) {
      const double t = std::exp(u);
      // Densities as steep as t^-2 overflow near 1e-300; the mass of g below
      // kLogFloor is negligible for any admissible measure.
      if (t < kLogFloor) return 0.0;
      const double dens = m.density(t);
      if (dens == 0.0) return 0.0;
      return g(t) * dens * t;
    };
    total += checked_gk(in_log, a, b, abs_tol);
  }
  if (hi > 1.0 && std::isfinite(hi)) {
    auto direct = [&](double t) {
      const double dens = m.density(t);
      if (dens == 0.0) return 0.0;
      return g(t) * dens;
    };
    total += checked_gk(direct, std::max(lo, 1.0), hi, abs_tol);
  } else if (hi > 1.0) {
    // Unbounded support: log t turns power-law tails into exponential decay.
    auto tail = [&](double u) {
      const double t = std::exp(u);
      if (!std::isfinite(t)) return 0.0;
      const double dens = m.density(t);
      if (dens == 0.0) return 0.0;
      return g(t) * dens * t;
    };
    total += checked_gk(tail, std::log(std::max(lo, 1.0)), kInf, abs_tol);
  }
  return total;
}

double lower_quantile(const NumericMeasure& m, const std::function<double(double)>& w, double target) {
  const double t_top = std::isfinite(m.t_hi) ? m.t_hi : 1e6;
  auto mass_below = [&](double t) { return integrate_measure(m, w, m.t_lo, t, 1e-3 * target); };
  if (mass_below(t_top) <= target) return t_top;
  double log_lo = std::log(std::max(m.t_lo, kTinyT));
  double log_hi = std::log(t_top);
  for (int it = 0; it < 100 && log_hi - log_lo > 1e-10; ++it) {
    const double mid = 0.5 * (log_lo + log_hi);
    if (mass_below(std::exp(mid)) < target) {
      log_lo = mid;
    } else {
      log_hi = mid;
    }
  }
  return std::exp(log_lo);
}

double upper_truncation(const NumericMeasure& m, double rho, double target) {
  if (std::isfinite(m.t_hi)) return m.t_hi;
  auto weight = [rho](double t) { return std::exp(rho * t); };
  for (double t = std::max(1.0, m.t_lo); t < 1e12; t *= 2.0) {
    if (integrate_measure(m, weight, t, kInf, 1e-3 * target) <= target) return t;
  }
  throw NumericalError("could not bound the Levy-measure tail for rho = " + std::to_string(rho));
}

double estimate_r_max(const NumericMeasure& m) {
  if (std::isfinite(m.t_hi)) return kInf;

  // Largest window [T/2, T] on which the density is still representable.
  double window_top = std::max(2.0, 2.0 * m.t_lo);
  while (window_top < 8192.0 && m.density(2.0 * window_top) > 1e-300) window_top *= 2.0;
  const double window_lo = std::max(1.0, 0.5 * window_top);

  auto mass = [&](double r, double a, double b) {
    auto f = [&](double t) {
      const double dens = m.density(t);
      if (dens <= 0.0) return 0.0;
      return std::exp(r * t + std::log(dens));
    };
    double error = 0.0;
    return GaussKronrod::integrate(f, a, b, 15, 1e-8, &error);
  };
  // The truncated integral is taken as divergent when its last window still
  // carries a non-negligible fraction of the mass.
  auto diverges = [&](double r) {
    const double head = mass(r, 1.0, window_lo);
    const double tail = mass(r, window_lo, window_top);
    if (!std::isfinite(head) || !std::isfinite(tail)) return true;
    return tail > 1e-3 * std::max(head, 1e-300);
  };

  if (diverges(0.0)) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (!diverges(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) return kInf;
  }
  for (int it = 0; it < 60 && hi - lo > 1e-10 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (diverges(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

NumericMeasureCache build_cache(const NumericMeasure& m) {
  NumericMeasureCache cache;
  cache.r_max = estimate_r_max(m);

  try {
    cache.total_mass = integrate_measure(m, [](double) { return 1.0; });
  } catch (const NumericalError&) {
    cache.total_mass = kInf;
  }
  try {
    cache.first_moment = integrate_measure(m, [](double t) { return t; });
  } catch (const NumericalError& e) {
    cache.first_moment_error = e.what();
  }

  try {
    const double second_moment = integrate_measure(m, [](double t) { return t * t; });
    if (!(second_moment > 0.0)) throw NumericalError("Levy measure has zero second moment");
    // Discarded small-jump variance below 1e-6 of the total.
    const double cutoff = std::max(lower_quantile(m, [](double t) { return t * t; }, 0.5e-6 * second_moment),
                                   std::max(m.t_lo, kTinyT));
    const double mass_above = integrate_measure(m, [](double) { return 1.0; }, cutoff, m.t_hi, 1e-12);
    const double t_upper = std::max(upper_truncation(m, 0.0, 1e-12 * std::max(1.0, mass_above)), cutoff * 2.0);

    cache.cutoff = cutoff;
    cache.effective_drift = m.b + integrate_measure(m, [](double t) { return t; }, m.t_lo, cutoff);

    constexpr std::size_t kCells = 2048;
    cache.grid.resize(kCells + 1);
    cache.cdf.assign(kCells + 1, 0.0);
    const double log_a = std::log(cutoff);
    const double log_b = std::log(t_upper);
    for (std::size_t i = 0; i <= kCells; ++i) {
      cache.grid[i] = std::exp(log_a + (log_b - log_a) * static_cast<double>(i) / kCells);
    }
    cache.grid.front() = cutoff;
    cache.grid.back() = t_upper;
    using Gauss = boost::math::quadrature::gauss<double, 15>;
    for (std::size_t i = 0; i < kCells; ++i) {
      const double cell = Gauss::integrate([&](double t) { return m.density(t); }, cache.grid[i], cache.grid[i + 1]);
      cache.cdf[i + 1] = cache.cdf[i] + std::max(cell, 0.0);
    }
    cache.jump_rate = cache.cdf.back();
    cache.sampler_ready = std::isfinite(cache.jump_rate) && std::isfinite(cache.effective_drift);
    if (!cache.sampler_ready) cache.sampler_error = "non-finite compound-Poisson approximation";
  } catch (const Error& e) {
    cache.sampler_error = e.what();
  }
  return cache;
}

double draw_jump(const NumericMeasureCache& cache, double uniform01) {
  const double target = uniform01 * cache.jump_rate;
  const auto it = std::upper_bound(cache.cdf.begin(), cache.cdf.end(), target);
  if (it == cache.cdf.begin()) return cache.grid.front();
  if (it == cache.cdf.end()) return cache.grid.back();
  const auto i = static_cast<std::size_t>(it - cache.cdf.begin()) - 1;
  const double width = cache.cdf[i + 1] - cache.cdf[i];
  const double frac = width > 0.0 ? (target - cache.cdf[i]) / width : 0.0;
  return cache.grid[i] + frac * (cache.grid[i + 1] - cache.grid[i]);
}

}  // namespace tcc::detail
