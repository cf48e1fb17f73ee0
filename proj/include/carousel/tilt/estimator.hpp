#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "carousel/estimate.hpp"
#include "carousel/logtan/p1_table.hpp"
#include "carousel/model.hpp"
#include "carousel/sde/noise.hpp"
#include "carousel/sde/path.hpp"
#include "carousel/tilt/girsanov.hpp"

namespace carousel::tilt {

struct TiltConfig {
  double dt = 1e-3;
  /// A node of length h is split while max(|h(t,x)|, (F/2) cosh x) * h exceeds this, which
  /// keeps the Euler maps of both Y and X monotone.
  double refine_threshold = 0.25;
  int min_depth = 0;
  int max_depth = 20;
  double warm_target = 0.01;
  double x_guard = 30.0;  ///< Y above this is reported as an invariant violation
  unsigned threads = 0;
};

/// Y on [delta, T] from the warm start, every (sub)step recorded. Throws InvariantError if
/// Y crosses cfg.x_guard.
sde::SdePath simulate_Y(const ModelParams& params, const sde::NoiseStream& stream,
                        const TiltConfig& cfg = {});

/// Terminal value and phi-integral of one Y path without storing it.
struct YOutcome {
  double y_T = 0.0;
  double psi_integral = 0.0;
  std::size_t n_leaves = 0;
};

YOutcome run_Y(const ModelParams& params, const sde::NoiseStream& stream, const TiltConfig& cfg);

struct ISResult {
  GapEstimate estimate;   ///< p_lambda, method = importance; stderr covers paths and table
  double m = 0.0;         ///< E[p_1(Y(T)) exp(psi + offset)]
  double m_stderr = 0.0;  ///< path sampling only
  /// First-order effect of the table's own Monte Carlo error: sqrt(sum_k (dm/dv_k se_k)^2)
  /// with dm/dv_k by central differences on the same paths.
  double m_table_stderr = 0.0;
  double log_prefactor = 0.0;
  double offset = 0.0;
  double delta = 0.0;
  double entrance_budget = 0.0;
  double max_psi = 0.0;   ///< largest psi_terminal + psi_integral over the paths
  double mean_leaves = 0.0;
};

/// p_lambda = exp(log_prefactor) * E[p_1(Y(T)) exp(psi + offset)]; path i uses stream_id i.
/// The table error is common to every lambda run against the same table, so m_stderr
/// alone is the right scale when comparing those runs with each other.
ISResult estimate_p_lambda_IS(const ModelParams& params, const logtan::P1Table& table,
                              std::size_t n_samples, std::uint64_t seed,
                              const TiltConfig& cfg = {});

struct KappaResult {
  std::vector<double> lambdas;
  std::vector<double> m;
  std::vector<double> m_stderr;
  std::vector<ISResult> runs;
  double kappa_hat = 0.0;
  double kappa_stderr = 0.0;  ///< paths and table combined
  /// Steps of m between consecutive lambdas that decrease by more than 3 combined stderr.
  std::vector<std::size_t> non_monotone_steps;
};

/// m(lambda) over an increasing list spanning at least a factor 4; kappa_hat = m at the
/// largest lambda. Each lambda uses seed + index.
KappaResult estimate_kappa(double beta, const std::vector<double>& lambdas,
                           const logtan::P1Table& table, std::size_t n_samples, std::uint64_t seed,
                           const TiltConfig& cfg = {});

}  // namespace carousel::tilt
