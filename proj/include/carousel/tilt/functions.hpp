#pragma once

#include "carousel/model.hpp"

namespace carousel::tilt {

/// (8 - 6 beta + beta^2) / 32, the value of eta(x)/sinh(x) at x = 0.
double eta_over_sinh_at_zero(double beta);

/// eta(x) = c (2 s + s^2) + tanh(x)^2 / 8 with s = tanh(x/2), c = eta_over_sinh_at_zero.
double eta(double x, double beta);

/// q(x) = eta(x) / sinh(x), written in s = tanh(x/2) so the removable singularity at 0
/// never appears: q = (1 - s^2) (c (1 + s/2) + s / (4 (1 + s^2)^2)).
double q_fn(double x, double beta);

/// dq/dx.
double dq_fn(double x, double beta);

/// Q(x) = integral_0^x q = 2c (s + s^2/4) + s^2 / (4 (1 + s^2)).
double Q_fn(double x, double beta);
double Q_minus_inf(double beta);  ///< -3c/2 + 1/8
double Q_plus_inf(double beta);   ///< 5c/2 + 1/8

/// log cosh y without overflow.
double log_cosh(double y);

/// u~(x) = (1 - beta/4) x + (1 - beta/2) log cosh(x/2) + (1/2) log cosh x.
double u_tilde(double x, double beta);

/// lim_{x -> -inf} u~(x) = (beta - 3)/2 * log 2.
double u_tilde_limit(double beta);

/// omega(x) = u~(x) - u~(-inf) - (2 - beta/2) x^+ - (8/beta) Q(x).
double omega(double x, double beta);

/// a(u) = (32 / beta^2) f(u); equals 2 / (lambda f(T - u)).
double a_of(double u, double beta);

/// h2 + h3 = (beta/4 - 1/2)(1 + tanh(x/2)) - 1/2.
double h23(double x, double beta);

/// Pieces of phi that depend on x only: phi(u, x) = a(u) P(x) + a(u)^2 R(x) with
/// P = (h2 + h3) q + (beta/4) Q + q'/2 and R = q^2 / 2.
double phi_P(double x, double beta);
double phi_R(double x, double beta);

/// phi(u, x) = 2 (h2 + h3) h4 + h4^2 + (beta/4) h~4 + (1/2) d_x h4 at t = T - u,
/// where h4 = a(u) q and h~4 = a(u) Q.
double phi(double u, double x, double beta);

/// |phi(u, x)| <= C1 f(u) + C2 f(u)^2 for all x.
struct PhiBound {
  double C1 = 0.0;
  double C2 = 0.0;
  double beta = 2.0;
  double operator()(double u) const;
  /// integral_0^inf of the bound: C1 + C2 beta / 8.
  double integral() const;
};

/// Sup-scan of |P| and |R| over a dense grid in s = tanh(x/2) in [-1, 1], inflated by
/// a small safety factor.
PhiBound phi_bound(double beta);

/// sup_x |q(x)| by the same scan (unpadded).
double sup_abs_q(double beta);

/// Drift pieces of the tilted diffusion Y. F = lambda f(t).
double h1(double t, double x, const ModelParams& p);
double h4(double t, double x, const ModelParams& p);
double tilt_drift(double t, double x, const ModelParams& p);

/// Drift of X, (lambda/2) f(t) cosh x + tanh(x)/2, in the form used by the Girsanov
/// functional (g1 = (F/2) cosh x, g2 = tanh(x)/2).
double untilted_drift(double t, double x, const ModelParams& p);

/// Everything the samplers need at one state from a single expm1 call.
struct TiltPoint {
  double ex;      ///< e^x
  double s;       ///< tanh(x/2)
  double sinh_x;
  double cosh_x;
  double q;
  double dq;
  double Q;
  double h23;
};

class TiltKernel {
 public:
  explicit TiltKernel(double beta);
  double beta() const noexcept { return beta_; }
  TiltPoint at(double x) const noexcept;
  /// h(t, x) given F = lambda f(t).
  double drift(double F, const TiltPoint& p) const noexcept {
    return -0.5 * F * p.sinh_x + p.h23 + 2.0 / F * p.q;
  }
  /// phi with a = a(u).
  double phi(double a, const TiltPoint& p) const noexcept {
    const double P = p.h23 * p.q + 0.25 * beta_ * p.Q + 0.5 * p.dq;
    return a * P + 0.5 * a * a * p.q * p.q;
  }

 private:
  double beta_;
  double c_;
  double k_;  // beta/4 - 1/2
};

}  // namespace carousel::tilt
