#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "carousel/estimate.hpp"
#include "carousel/model.hpp"
#include "carousel/sde/noise.hpp"
#include "carousel/sde/path.hpp"

namespace carousel::logtan {

/// Marker for the entrance boundary at -infinity.
inline constexpr double kMinusInfinity = -std::numeric_limits<double>::infinity();

struct LogtanConfig {
  double dt = 1e-3;
  double x_max = 25.0;           ///< blow-up classification level
  double refine_threshold = 0.25;
  int max_depth = 16;
  int min_depth = 0;             ///< forces dt / 2^min_depth on the same Brownian path
  double warm_target = 0.01;     ///< lambda * F(delta) used for the warm start
  unsigned threads = 0;
};

/// Drift of X = log tan(alpha/4): (lambda/2) f(t) cosh x + tanh(x)/2. Returns +inf when
/// |x| > 700 with a positive speed term, which the integrators classify as blow-up.
double logtan_drift(double t, double x, const ModelParams& params);

struct WarmStart {
  double state = 0.0;
  double time = 0.0;
};

/// delta with lambda * F(delta) = min(target, lambda/2); F(t) = 1 - exp(-beta t / 4).
double warm_start_delta(const ModelParams& params, double target = 0.01);

/// X(delta) ~ log tan(lambda F(delta) / 4). Throws ConfigError unless lambda F(delta) <= 0.01.
WarmStart warm_start(const ModelParams& params, double delta);

/// Outcome of one X path without its trajectory.
struct XOutcome {
  bool blown_up = false;
  double time = 0.0;  ///< blow-up time, or t_end
  double x = 0.0;     ///< state at t_end when alive
};

/// Streaming X path on [t0, t_end] from x0 (finite) with adaptive sub-stepping.
XOutcome run_X(double x0, double t0, double t_end, const ModelParams& params,
               sde::BrownianTree& tree, const LogtanConfig& cfg);

/// X path on [0, horizon], recorded at every (sub)step. x0 = kMinusInfinity starts from
/// the warm start at time delta(target). BlownUp once X >= x_max.
sde::SdePath simulate_X(double x0, const ModelParams& params, double horizon,
                        const sde::NoiseStream& stream, const LogtanConfig& cfg = {});

/// Several X paths from different starts driven by one Brownian path with shared
/// refinement, so the Euler maps stay monotone and the ordering of starts is kept.
/// Starts must be finite. Paths are recorded on the common leaf grid; a blown-up member
/// stops recording.
std::vector<sde::SdePath> simulate_X_coupled(const std::vector<double>& x0s,
                                             const ModelParams& params, double horizon,
                                             const sde::NoiseStream& stream,
                                             const LogtanConfig& cfg = {});

/// Probability that the driftless phase from alpha = 4 arctan(e^x) is absorbed at 0.
double survival_weight(double x);

/// Horizon with exp(-beta h / 4) <= tolerance.
double p1_default_horizon(double beta, double tolerance = 1e-4);

/// Monte Carlo estimate of p_1(x) (lambda = 1). Path i uses stream (seed, stream_base + i).
GapEstimate estimate_p1(double x, double beta, std::size_t n_samples, double horizon,
                        std::uint64_t seed, const LogtanConfig& cfg = {},
                        std::uint64_t stream_base = 0);

}  // namespace carousel::logtan
