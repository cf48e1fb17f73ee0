#pragma once

#include <vector>

#include "carousel/estimate.hpp"

namespace carousel::oracles {

/// Least-squares fit of log E(1; lambda) - log E(0; lambda) = a lambda + b log lambda + c.
struct BtwFit {
  double slope = 0.0;           ///< a, target beta/4
  double log_coefficient = 0.0; ///< b, target (1 - beta)/2
  double intercept = 0.0;
  double slope_stderr = 0.0;    ///< propagated from the input stderrs
  double log_coefficient_stderr = 0.0;
  double condition_number = 0.0;
  bool declined = false;        ///< true when the design is too ill-conditioned to report
};

inline constexpr double kBtwMaxCondition = 1e10;

/// Needs at least three lambdas and relative stderr < 20% for every estimate
/// (ConfigError otherwise).
BtwFit btw_slope_check(const std::vector<double>& lambdas, const std::vector<GapEstimate>& e0,
                       const std::vector<GapEstimate>& e1);

/// Same fit on exact values (no stderrs).
BtwFit btw_fit_values(const std::vector<double>& lambdas, const std::vector<double>& y);

/// Generic least squares y ~ X beta with propagated standard errors sigma; returns the
/// coefficients, their standard errors and the 2-norm condition number of X.
struct LinearFit {
  std::vector<double> coef;
  std::vector<double> stderr_;
  double condition_number = 0.0;
};

LinearFit least_squares(const std::vector<std::vector<double>>& rows, const std::vector<double>& y,
                        const std::vector<double>& sigma = {});

}  // namespace carousel::oracles
