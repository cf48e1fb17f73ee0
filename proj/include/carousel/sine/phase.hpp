#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "carousel/estimate.hpp"
#include "carousel/model.hpp"
#include "carousel/sde/noise.hpp"
#include "carousel/sde/path.hpp"

namespace carousel::sine {

struct PhaseConfig {
  double dt = 0.0;                ///< 0 selects min(1e-3, 0.1/lambda)
  double drift_tolerance = 1e-4;  ///< radians of drift left after the horizon
  int refine_levels = 0;          ///< run at dt / 2^levels on the same Brownian path
  unsigned threads = 0;           ///< 0 = hardware concurrency
};

double default_phase_dt(double lambda);

/// Smallest horizon with lambda * exp(-beta t / 4) <= tolerance.
double required_horizon(const ModelParams& params, double tolerance);

/// Drift still to come after t_end: lambda * integral_{t_end}^inf f = lambda exp(-beta t_end / 4).
double residual_drift_bound(const ModelParams& params, double t_end);

/// Trajectory of the phase alpha_lambda of dα = λ f dt + 2 sin(α/2) dW, α(0) = 0.
struct PhasePath {
  sde::SdePath path;
  double lambda = 0.0;
  double residual_drift_bound = 0.0;
};

/// Any positive horizon is accepted; consumers of the terminal value check the recorded
/// residual drift bound.
PhasePath simulate_phase(const ModelParams& params, double horizon, const sde::NoiseStream& stream,
                         const PhaseConfig& cfg = {});

/// Absorption probability at 2πk of the drift-free phase martingale started from alpha:
/// the hat function centred at 2πk with half-width 2π.
double terminal_weight_k(double alpha, int k);

/// Same, from a simulated path; throws ConfigError if the path's residual drift exceeds
/// the tolerance.
double terminal_weight_k(const PhasePath& phase, int k, double tolerance = 1e-4);

/// Direct estimates of E_beta(k; lambda) for k = 0..k_max from one set of paths.
struct DirectRun {
  std::vector<GapEstimate> by_k;
  double mean_count = 0.0;
  double mean_count_stderr = 0.0;
  double dt = 0.0;
  double horizon = 0.0;
  double bias_bound = 0.0;  ///< residual drift / (2π), per path
};

DirectRun estimate_gap_direct_all(const ModelParams& params, int k_max, std::size_t n_samples,
                                  std::uint64_t seed, const PhaseConfig& cfg = {});

GapEstimate estimate_gap_direct(const ModelParams& params, int k, std::size_t n_samples,
                                std::uint64_t seed, const PhaseConfig& cfg = {});

/// Terminal phases α_λ(horizon) for each path; path i uses stream_id i.
std::vector<double> simulate_terminal_phases(const ModelParams& params, std::size_t n_samples,
                                             std::uint64_t seed, const PhaseConfig& cfg = {});

/// Coupled family dα_λ = λ f dt + Re((e^{-iα_λ} - 1) dZ), Z = B1 + i B2, one path per
/// lambda, all driven by the same two-dimensional stream.
std::vector<PhasePath> simulate_phase_family(const std::vector<double>& lambda_grid, double beta,
                                             double horizon, const sde::NoiseStream& stream,
                                             const PhaseConfig& cfg = {});

/// Terminal values only, without recording the trajectories.
std::vector<double> phase_family_terminal(const std::vector<double>& lambda_grid, double beta,
                                          double horizon, const sde::NoiseStream& stream,
                                          const PhaseConfig& cfg = {});

/// A point configuration of Sine_beta on [0, lambda_max], resolved to the cells of a
/// uniform lambda grid: each point sits at the midpoint of the cell where the rounded
/// count increased.
struct PointConfiguration {
  std::vector<double> points;
  std::vector<long> counts;  ///< rounded count at each grid lambda
  double cell_width = 0.0;
};

PointConfiguration sample_sine_beta(double lambda_max, double beta, std::size_t resolution,
                                    std::uint64_t seed, const PhaseConfig& cfg = {});

/// Drift-free phase dα = 2 sin(α/2) dW from a0, stopped as Absorbed once within eps of
/// 0 or 2π; Alive at the horizon otherwise.
sde::SdePath simulate_driftless_phase(double a0, double horizon, const sde::NoiseStream& stream,
                                      double dt = 1e-3, double eps = 1e-9);

}  // namespace carousel::sine
