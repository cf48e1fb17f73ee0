#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "carousel/numerics/stats.hpp"
#include "carousel/sde/noise.hpp"
#include "carousel/sde/path.hpp"
#include "carousel/tilt/estimator.hpp"

namespace carousel::tilt {

/// Drift constant of Z: 1/2 + 2 |beta/4 - 1/2| + sup|h4| + 1/2, with sup|h4| over t <= T
/// equal to (8/beta) sup|q|. Not to be confused with u~(-inf).
double domination_drift_constant(double beta);

/// c1 - (beta/16 + sup_{tau, x} h0(tau, x)); non-negative means r(z) >= h~(tau, z) for
/// every z >= 0 and tau <= 0, which is what the coupling argument uses.
double domination_margin(double beta, double c1);

/// r(z) = -(beta/16) e^z + c1.
double z_drift(double z, double beta, double c1);

/// Stationary law g(z) proportional to exp(-(beta/8) e^z + 2 c1 z) on [0, inf).
class ZStationary {
 public:
  ZStationary(double beta, double c1);
  double density(double z) const;
  double cdf(double z) const;
  double quantile(double p) const;

 private:
  double beta_;
  double c1_;
  double log_norm_;
  double upper_at_zero_;
};

/// Reflected Euler scheme z <- |z + r(z) h + dW|, with steps split while |r| h > 0.25.
sde::SdePath simulate_Z(double z0, double beta, double c1, double horizon,
                        const sde::NoiseStream& stream, double dt = 1e-3);

/// Terminal values of n independent Z paths from z0 after `burn_in` time; path i uses
/// stream_id i.
std::vector<double> z_terminal_samples(double beta, double c1, double z0, double burn_in,
                                       std::size_t n, std::uint64_t seed, double dt = 1e-3,
                                       unsigned threads = 0);

/// Pearson test of samples against g over `bins` equiprobable cells.
numerics::TestResult z_chi_square(const std::vector<double>& samples, double beta, double c1,
                                  int bins = 20);

/// Y~_{T1}, Y~_{T2} and Z in shifted time tau = t - T on one Brownian path, with shared
/// refinement. Y~_{T2} starts at tau = -T2 + delta, Y~_{T1} at -T1 + delta (same delta,
/// chosen for the larger lambda), Z at -T2 + delta from z0. Values of Y~_{T1} before its
/// start are NaN.
struct ShiftedCoupling {
  double T1 = 0.0;
  double T2 = 0.0;
  double delta = 0.0;
  std::vector<double> tau;
  std::vector<double> y1;
  std::vector<double> y2;
  std::vector<double> z;
};

/// T2 - T1 must be a whole number of dt steps.
ShiftedCoupling simulate_shifted_coupling(double beta, double T1, double T2, double z0, double c1,
                                          const sde::NoiseStream& stream,
                                          const TiltConfig& cfg = {});

struct CouplingViolations {
  std::size_t y_order = 0;    ///< points with Y~_{T1} > Y~_{T2}
  std::size_t z_dominance = 0;///< points with Y~ > Z
};

CouplingViolations count_violations(const ShiftedCoupling& c, double tol = 1e-12);

}  // namespace carousel::tilt
