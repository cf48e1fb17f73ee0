#include "carousel/tilt/girsanov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "carousel/errors.hpp"

namespace carousel::tilt {

namespace {

void check_path(const sde::SdePath& path, const ModelParams& p) {
  if (path.times.size() < 2 || path.times.size() != path.values.size()) {
    throw ConfigError("Girsanov functional needs a recorded path with at least two points");
  }
  const double T = p.T();
  if (std::abs(path.times.back() - T) > 1e-9 * std::max(1.0, T)) {
    throw ConfigError("path ends at " + std::to_string(path.times.back()) + " but T = " +
                      std::to_string(T) + " for this lambda");
  }
}

double integral_f(double beta, double s0, double s) {
  return std::exp(-0.25 * beta * s0) - std::exp(-0.25 * beta * s);
}

double integral_f2(double beta, double s0, double s) {
  return beta / 8.0 * (std::exp(-0.5 * beta * s0) - std::exp(-0.5 * beta * s));
}

}  // namespace

double deterministic_part(const ModelParams& p, double s0, double s) {
  const double b = p.beta;
  return -p.lambda * p.lambda / 8.0 * integral_f2(b, s0, s) +
         p.lambda * (b / 8.0 - 0.25) * integral_f(b, s0, s) + (b * b - 6.0 * b + 4.0) / 32.0 * (s - s0);
}

double boundary_term(const ModelParams& p, double s, double x) {
  const double F = p.lambda * speed_f(s, p.beta);
  if (!(F > 0.0)) throw DomainError("boundary_term: needs lambda f(s) > 0");
  const double lead = std::isinf(x) && x < 0.0 ? 0.0 : 0.5 * F * std::exp(x);
  const double ut = std::isinf(x) && x < 0.0 ? u_tilde_limit(p.beta) : u_tilde(x, p.beta);
  const double Q = std::isinf(x) && x < 0.0 ? Q_minus_inf(p.beta) : Q_fn(x, p.beta);
  return lead + ut - 2.0 / F * Q;
}

double psi_terminal(double y, double beta) {
  return beta / 8.0 * std::exp(y) + (2.0 - 0.5 * beta) * std::max(y, 0.0) + omega(y, beta);
}

double girsanov_offset(const ModelParams& p, double s0, double x0) {
  // B(T, y) = psi_terminal(y) + u~(-inf), so the remaining constant is
  // Det(s0, T) + u~(-inf) - B(s0, x0) - log_prefactor.
  return deterministic_part(p, s0, p.T()) + u_tilde_limit(p.beta) - boundary_term(p, s0, x0) -
         p.log_leading_order();
}

GirsanovDecomposition G_closed_form(const sde::SdePath& path, const ModelParams& p) {
  check_path(path, p);
  const double T = p.T();
  const TiltKernel kernel(p.beta);
  GirsanovDecomposition d;
  d.log_prefactor = p.log_leading_order();
  d.psi_terminal = psi_terminal(path.values.back(), p.beta);
  double prev = 0.0;
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    const double a = a_of(std::max(T - path.times[i], 0.0), p.beta);
    const double ph = kernel.phi(a, kernel.at(path.values[i]));
    if (i > 0) d.psi_integral += 0.5 * (path.times[i] - path.times[i - 1]) * (prev + ph);
    prev = ph;
  }
  const double s0 = path.times.front();
  d.offset = girsanov_offset(p, s0, path.values.front());
  d.total = d.log_prefactor + d.psi_terminal + d.psi_integral + d.offset;
  d.entrance_budget = s0 * phi_bound(p.beta)(std::max(T - s0, 0.0));
  return d;
}

std::vector<double> running_closed_form(const sde::SdePath& path, const ModelParams& p) {
  if (path.times.empty() || path.times.size() != path.values.size()) {
    throw ConfigError("running_closed_form: empty path");
  }
  const double T = p.T();
  const TiltKernel kernel(p.beta);
  const double s0 = path.times.front();
  const double b0 = boundary_term(p, s0, path.values.front());
  std::vector<double> out(path.times.size());
  double integral = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    const double t = path.times[i];
    const double ph = kernel.phi(a_of(std::max(T - t, 0.0), p.beta), kernel.at(path.values[i]));
    if (i > 0) integral += 0.5 * (t - path.times[i - 1]) * (prev + ph);
    prev = ph;
    out[i] = deterministic_part(p, s0, t) + boundary_term(p, t, path.values[i]) - b0 + integral;
  }
  return out;
}

double closed_form_lower_bound(const ModelParams& p, double s0, double x0, double s,
                               const PhiBound& bound) {
  // B(s, .) is bounded below: it tends to a constant at -inf and the e^x term wins at +inf.
  double inf_b = boundary_term(p, s, -std::numeric_limits<double>::infinity());
  for (int i = 0; i <= 16000; ++i) {
    inf_b = std::min(inf_b, boundary_term(p, s, -40.0 + 0.005 * i));
  }
  inf_b -= 1e-9 * (1.0 + std::abs(inf_b));
  return deterministic_part(p, s0, s) + inf_b - boundary_term(p, s0, x0) - bound.integral();
}

GDirectParts G_direct_parts(const sde::SdePath& path, const ModelParams& p) {
  if (!path.alive()) throw DomainError("G_direct: path did not survive");
  if (path.times.size() < 2) throw ConfigError("G_direct: path needs at least two points");
  const TiltKernel kernel(p.beta);
  auto F = [&](double t) { return p.lambda * speed_f(t, p.beta); };
  // h - g = -(F/2) e^x - (tanh(x)/2 - h2 - h3) + h4
  // h + g = (F/2) e^{-x} + h2 + h3 + h4 + tanh(x)/2
  auto hmg = [&](double t, double x) {
    const auto pt = kernel.at(x);
    const double Ft = F(t);
    const double th = 2.0 * pt.s / (1.0 + pt.s * pt.s);
    return -0.5 * Ft * pt.ex - (0.5 * th - pt.h23) + 2.0 / Ft * pt.q;
  };
  auto hpg = [&](double t, double x) {
    const auto pt = kernel.at(x);
    const double Ft = F(t);
    const double th = 2.0 * pt.s / (1.0 + pt.s * pt.s);
    return 0.5 * Ft / pt.ex + pt.h23 + 2.0 / Ft * pt.q + 0.5 * th;
  };
  return g_functional(path, hmg, hpg);
}

double G_direct(const sde::SdePath& path, const ModelParams& p) {
  return G_direct_parts(path, p).total();
}

}  // namespace carousel::tilt
