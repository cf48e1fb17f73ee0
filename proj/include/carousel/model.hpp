#pragma once

namespace carousel {

/// Speed function of the carousel, f(t) = (beta/4) exp(-beta t / 4).
double speed_f(double t, double beta);

/// Integral of the speed function over [0, t]: 1 - exp(-beta t / 4).
double cumulative_f(double t, double beta);

/// Interval length lambda and inverse temperature beta with the derived quantities
/// used throughout: the tilt horizon T and the power gamma_beta.
struct ModelParams {
  double beta = 2.0;
  double lambda = 1.0;

  /// Throws ConfigError unless beta > 0 and lambda >= 0 (lambda = 0 is allowed for tests).
  ModelParams(double beta, double lambda);

  /// T = (4/beta) log(lambda); throws DomainError for lambda < 1.
  double T() const;

  /// gamma_beta = (beta/2 + 2/beta - 3) / 4.
  double gamma_beta() const noexcept { return gamma_of(beta); }

  static double gamma_of(double beta) noexcept { return 0.25 * (0.5 * beta + 2.0 / beta - 3.0); }

  /// Logarithm of lambda^gamma exp(-beta lambda^2/64 + (beta/8 - 1/4) lambda).
  double log_leading_order() const;
};

}  // namespace carousel
