#pragma once

/**
 * @file simulation.hpp
 * @brief Monte Carlo simulation of time-changed controlled linear diffusions.
 *
 * Controller step k holds U = K(s_k) X(s_k) while the clock advances by a
 * fresh increment dtau ~ tau_ds; the plant is integrated over dtau units of
 * plant time with the input frozen, which is exactly U(zeta_t) being constant
 * on clock-jump intervals. Clock and Brownian draws come from separate
 * streams, so two policies simulated with the same seeds see the same clock.
 */

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tcc/clock.hpp"
#include "tcc/lqr.hpp"

namespace tcc {

struct SimConfig {
  double ds = 0.01;             ///< controller-time step; must divide S
  std::size_t substeps = 10;    ///< Euler-Maruyama steps per controller step
  std::size_t n_paths = 1000;
  std::uint64_t seed = 0;
  double max_plant_step = 1e-2; ///< substeps grow so no plant-time step exceeds this
  unsigned threads = 0;         ///< 0: hardware concurrency

  void validate(double S) const;
  std::size_t steps(double S) const;
};

struct PathSeeds {
  std::uint64_t clock = 0;
  std::uint64_t diffusion = 0;
};

/// Seeds of path `path`. The clock seed ignores diffusion_stream, so runs that
/// differ only in diffusion_stream share clock paths.
PathSeeds path_seeds(std::uint64_t master, std::size_t path, std::uint64_t diffusion_stream = 0);

struct TrajectoryRecord {
  std::vector<double> s;
  std::vector<double> tau;           ///< plant time at each node
  std::vector<Vector> X;             ///< X_s = Y(tau_s) at each node
  std::vector<Vector> U;             ///< input held over (s_k, s_{k+1}]
  std::vector<double> running_cost;  ///< int_0^{s_k} (X'QX + U'RU) ds
  double cost = 0.0;                 ///< running cost plus X_S' Phi X_S
};

TrajectoryRecord simulate_trajectory(const SubordinatorModel& model, const LinearPlant& plant,
                                     const QuadraticCost& cost, const GainSchedule& gains, const Vector& x0,
                                     const SimConfig& cfg, PathSeeds seeds);

struct MCSummary {
  double mean = 0.0;
  double std_error = 0.0;  ///< sample standard deviation / sqrt(paths used)
  std::size_t n_paths = 0;
  std::size_t n_failed = 0;  ///< paths dropped after numerical divergence
  std::vector<double> samples;
  std::vector<Vector> terminal_states;

  /// Builds mean and standard error from per-sample values.
  static MCSummary from_samples(std::vector<double> samples);
};

MCSummary estimate_cost(const SubordinatorModel& model, const LinearPlant& plant, const QuadraticCost& cost,
                        const GainSchedule& gains, const Vector& x0, const SimConfig& cfg,
                        std::uint64_t diffusion_stream = 0);

struct DynkinResult {
  double empirical = 0.0;  ///< MC estimate of (E[V(s + delta, X)] - V(s, x)) / delta
  double predicted = 0.0;  ///< closed-form A^u V(s, x)
  double std_error = 0.0;
  double z_score = 0.0;
};

/// Compares a one-step Monte Carlo difference quotient with the generator of
/// the quadratic value function. delta_nodes grid steps are taken at once;
/// the plant transition over each clock increment is sampled exactly.
DynkinResult dynkin_check(const SubordinatorModel& model, const TimeChangedMappings& maps, const LinearPlant& plant,
                          const QuadraticValue& value, std::size_t node, std::size_t delta_nodes, const Vector& x,
                          const Vector& u, std::size_t n_paths, std::uint64_t seed, unsigned threads = 0);

struct LabeledTrajectory {
  std::string policy;
  std::size_t path = 0;
  const TrajectoryRecord* record = nullptr;
};

/// Columns policy, path, s, tau, X_i..., U_i..., running_cost.
void write_trajectory_csv(std::ostream& os, const std::vector<LabeledTrajectory>& paths,
                          const std::string& metadata = {});

/// Shared-bin histogram: columns bin_lo, bin_hi, then one count column per series.
void write_histogram_csv(std::ostream& os, const std::vector<std::pair<std::string, std::vector<double>>>& series,
                         std::size_t bins, const std::string& metadata = {});

double sample_variance(const std::vector<double>& values);

}  // namespace tcc
