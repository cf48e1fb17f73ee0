#pragma once

#include <vector>

#include "carousel/model.hpp"
#include "carousel/sde/path.hpp"
#include "carousel/tilt/functions.hpp"

namespace carousel::tilt {

/// -G over [s0, T] for a Y path started at Y(s0), split as
/// total = log_prefactor + psi_terminal + psi_integral + offset.
///
/// log_prefactor = -(beta/64) lambda^2 + (beta/8 - 1/4) lambda + gamma_beta log lambda,
/// psi_terminal = (beta/8) e^{Y(T)} + (2 - beta/2) Y(T)^+ + omega(Y(T)),
/// psi_integral = integral_{s0}^T phi(T - t, Y(t)) dt (trapezoid on the path's points),
/// offset = the remaining deterministic constants, which depend on s0 and Y(s0) only.
struct GirsanovDecomposition {
  double log_prefactor = 0.0;
  double psi_terminal = 0.0;
  double psi_integral = 0.0;
  double offset = 0.0;
  double total = 0.0;
  /// Bound on the phi-integral over the skipped entrance interval [0, s0].
  double entrance_budget = 0.0;
};

/// Deterministic part of -G over [s0, s]:
/// -(lambda^2/8) int f^2 + lambda (beta/8 - 1/4) int f + ((beta^2 - 6 beta + 4)/32)(s - s0).
double deterministic_part(const ModelParams& p, double s0, double s);

/// Boundary term B(s, x) = (F(s)/2) e^x + u~(x) - (2/F(s)) Q(x), F = lambda f.
double boundary_term(const ModelParams& p, double s, double x);

/// The constant c such that -G over [s0, T] = log_prefactor + psi_terminal + psi_integral + c.
double girsanov_offset(const ModelParams& p, double s0, double x0);

double psi_terminal(double y, double beta);

/// Closed form from a recorded Y path ending at T = (4/beta) log lambda. Throws
/// ConfigError when the path does not end at T.
GirsanovDecomposition G_closed_form(const sde::SdePath& path, const ModelParams& p);

/// -G over [s0, s] at every recorded point s, same conventions as G_closed_form.
std::vector<double> running_closed_form(const sde::SdePath& path, const ModelParams& p);

/// Deterministic lower bound for -G over [s0, s]: deterministic part + inf_x B(s, .)
/// - B(s0, x0) - integral of the phi bound.
double closed_form_lower_bound(const ModelParams& p, double s0, double x0, double s,
                               const PhiBound& bound);

struct GDirectParts {
  double stochastic = 0.0;  ///< sum (h - g)(t_i, X_i) (X_{i+1} - X_i)
  double quadratic = 0.0;   ///< sum (h^2 - g^2)(t_i, X_i) (t_{i+1} - t_i)
  double total() const noexcept { return stochastic - 0.5 * quadratic; }
};

/// Left-point sums for G = int (h - g) dX - (1/2) int (h^2 - g^2) dt with caller-supplied
/// h - g and h + g.
template <class HminusG, class HplusG>
GDirectParts g_functional(const sde::SdePath& path, HminusG&& hmg, HplusG&& hpg) {
  GDirectParts out;
  for (std::size_t i = 0; i + 1 < path.times.size(); ++i) {
    const double t = path.times[i];
    const double x = path.values[i];
    const double d = hmg(t, x);
    out.stochastic += d * (path.values[i + 1] - x);
    out.quadratic += d * hpg(t, x) * (path.times[i + 1] - t);
  }
  return out;
}

GDirectParts G_direct_parts(const sde::SdePath& path, const ModelParams& p);

/// G from its definition with h the tilted drift and g the drift of X. Throws
/// DomainError for a path that did not survive.
double G_direct(const sde::SdePath& path, const ModelParams& p);

}  // namespace carousel::tilt
