#include "carousel/tilt/functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "carousel/errors.hpp"

namespace carousel::tilt {

namespace {

struct SPieces {
  double q, dq, Q;
};

SPieces pieces_of_s(double s, double c) {
  const double s2 = s * s;
  const double w = 1.0 + s2;
  const double A = c * (1.0 + 0.5 * s) + s / (4.0 * w * w);
  const double dA = 0.5 * c + (1.0 - 3.0 * s2) / (4.0 * w * w * w);
  const double one_m = 1.0 - s2;
  const double dq_ds = -2.0 * s * A + one_m * dA;
  return SPieces{one_m * A, 0.5 * one_m * dq_ds, 2.0 * c * (s + 0.25 * s2) + s2 / (4.0 * w)};
}

double half_tanh(double x) {
  if (x > 40.0) return 1.0;
  if (x < -40.0) return -1.0;
  const double em = std::expm1(x);
  return em / (em + 2.0);
}

}  // namespace

double eta_over_sinh_at_zero(double beta) { return (8.0 - 6.0 * beta + beta * beta) / 32.0; }

double eta(double x, double beta) {
  const double s = std::tanh(0.5 * x);
  const double t = std::tanh(x);
  return eta_over_sinh_at_zero(beta) * (2.0 * s + s * s) + 0.125 * t * t;
}

double q_fn(double x, double beta) { return pieces_of_s(half_tanh(x), eta_over_sinh_at_zero(beta)).q; }

double dq_fn(double x, double beta) {
  return pieces_of_s(half_tanh(x), eta_over_sinh_at_zero(beta)).dq;
}

double Q_fn(double x, double beta) { return pieces_of_s(half_tanh(x), eta_over_sinh_at_zero(beta)).Q; }

double Q_minus_inf(double beta) { return -1.5 * eta_over_sinh_at_zero(beta) + 0.125; }

double Q_plus_inf(double beta) { return 2.5 * eta_over_sinh_at_zero(beta) + 0.125; }

double log_cosh(double y) {
  const double a = std::abs(y);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

double u_tilde(double x, double beta) {
  return (1.0 - 0.25 * beta) * x + (1.0 - 0.5 * beta) * log_cosh(0.5 * x) + 0.5 * log_cosh(x);
}

double u_tilde_limit(double beta) { return 0.5 * (beta - 3.0) * std::numbers::ln2; }

double omega(double x, double beta) {
  return u_tilde(x, beta) - u_tilde_limit(beta) - (2.0 - 0.5 * beta) * std::max(x, 0.0) -
         8.0 / beta * Q_fn(x, beta);
}

double a_of(double u, double beta) { return 32.0 / (beta * beta) * speed_f(u, beta); }

double h23(double x, double beta) { return (0.25 * beta - 0.5) * (1.0 + half_tanh(x)) - 0.5; }

double phi_P(double x, double beta) {
  const auto p = pieces_of_s(half_tanh(x), eta_over_sinh_at_zero(beta));
  return h23(x, beta) * p.q + 0.25 * beta * p.Q + 0.5 * p.dq;
}

double phi_R(double x, double beta) {
  const double q = q_fn(x, beta);
  return 0.5 * q * q;
}

double phi(double u, double x, double beta) {
  if (!(u >= 0.0)) throw DomainError("phi: u must be non-negative");
  const double a = a_of(u, beta);
  return a * phi_P(x, beta) + a * a * phi_R(x, beta);
}

double PhiBound::operator()(double u) const {
  const double f = speed_f(u, beta);
  return C1 * f + C2 * f * f;
}

double PhiBound::integral() const { return C1 + C2 * beta / 8.0; }

namespace {

template <class Fn>
double scan_sup(Fn&& fn) {
  constexpr int kN = 200000;
  double best = 0.0;
  for (int i = 0; i <= kN; ++i) {
    const double s = -1.0 + 2.0 * i / kN;
    best = std::max(best, std::abs(fn(s)));
  }
  return best;
}

}  // namespace

double sup_abs_q(double beta) {
  const double c = eta_over_sinh_at_zero(beta);
  return scan_sup([c](double s) { return pieces_of_s(s, c).q; });
}

PhiBound phi_bound(double beta) {
  if (!(beta > 0.0)) throw ConfigError("phi_bound: beta must be positive");
  const double c = eta_over_sinh_at_zero(beta);
  const double k = 0.25 * beta - 0.5;
  const double supP = scan_sup([&](double s) {
    const auto p = pieces_of_s(s, c);
    return (k * (1.0 + s) - 0.5) * p.q + 0.25 * beta * p.Q + 0.5 * p.dq;
  });
  const double supR = scan_sup([&](double s) {
    const double q = pieces_of_s(s, c).q;
    return 0.5 * q * q;
  });
  const double pad = 1.0 + 1e-6;
  const double a = 32.0 / (beta * beta);
  return PhiBound{a * supP * pad + 1e-12, a * a * supR * pad + 1e-12, beta};
}

double h1(double t, double x, const ModelParams& p) {
  return -0.5 * p.lambda * speed_f(t, p.beta) * std::sinh(x);
}

double h4(double t, double x, const ModelParams& p) {
  const double F = p.lambda * speed_f(t, p.beta);
  if (!(F > 0.0)) throw DomainError("h4: needs lambda f(t) > 0");
  return 2.0 / F * q_fn(x, p.beta);
}

double tilt_drift(double t, double x, const ModelParams& p) {
  return h1(t, x, p) + h23(x, p.beta) + h4(t, x, p);
}

double untilted_drift(double t, double x, const ModelParams& p) {
  return 0.5 * p.lambda * speed_f(t, p.beta) * std::cosh(x) + 0.5 * std::tanh(x);
}

TiltKernel::TiltKernel(double beta)
    : beta_(beta), c_(eta_over_sinh_at_zero(beta)), k_(0.25 * beta - 0.5) {
  if (!(beta > 0.0)) throw ConfigError("TiltKernel: beta must be positive");
}

TiltPoint TiltKernel::at(double x) const noexcept {
  TiltPoint p{};
  double s;
  if (x > 40.0 || x < -40.0) {
    p.ex = std::exp(x);
    s = x > 0.0 ? 1.0 : -1.0;
    p.sinh_x = std::sinh(x);
    p.cosh_x = std::cosh(x);
  } else {
    const double em = std::expm1(x);
    p.ex = em + 1.0;
    s = em / (em + 2.0);
    p.sinh_x = 0.5 * em * (em + 2.0) / p.ex;
    p.cosh_x = p.sinh_x + 1.0 / p.ex;
  }
  p.s = s;
  const auto sp = pieces_of_s(s, c_);
  p.q = sp.q;
  p.dq = sp.dq;
  p.Q = sp.Q;
  p.h23 = k_ * (1.0 + s) - 0.5;
  return p;
}

}  // namespace carousel::tilt
