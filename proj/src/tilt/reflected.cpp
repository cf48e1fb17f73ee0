#include "carousel/tilt/reflected.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "carousel/errors.hpp"
#include "carousel/logtan/logtan.hpp"
#include "carousel/parallel.hpp"
#include "carousel/sde/integrate.hpp"
#include "carousel/tilt/functions.hpp"

namespace carousel::tilt {

double domination_drift_constant(double beta) {
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  return 0.5 + 2.0 * std::abs(0.25 * beta - 0.5) + 8.0 / beta * sup_abs_q(beta) + 0.5;
}

double domination_margin(double beta, double c1) {
  const double k = 0.25 * beta - 0.5;
  const double c = eta_over_sinh_at_zero(beta);
  double sup_h0 = -1e300;
  constexpr int kN = 200000;
  for (int i = 0; i <= kN; ++i) {
    const double s = -1.0 + 2.0 * i / kN;
    const double s2 = s * s;
    const double w = 1.0 + s2;
    const double q = (1.0 - s2) * (c * (1.0 + 0.5 * s) + s / (4.0 * w * w));
    // 2/F ranges over (0, 8/beta] for tau <= 0.
    sup_h0 = std::max(sup_h0, k * (1.0 + s) - 0.5 + 8.0 / beta * std::max(q, 0.0));
  }
  return c1 - (beta / 16.0 + sup_h0);
}

double z_drift(double z, double beta, double c1) { return -beta / 16.0 * std::exp(z) + c1; }

// With v = (beta/8) e^z the law of v is Gamma(2 c1, 1) restricted to v >= beta/8.
ZStationary::ZStationary(double beta, double c1) : beta_(beta), c1_(c1) {
  if (!(beta > 0.0) || !(c1 > 0.0)) throw ConfigError("ZStationary: beta and c1 must be positive");
  const double a = 2.0 * c1;
  upper_at_zero_ = boost::math::gamma_q(a, beta / 8.0);
  log_norm_ = boost::math::lgamma(a) + std::log(upper_at_zero_) - a * std::log(beta / 8.0);
}

double ZStationary::density(double z) const {
  if (z < 0.0) return 0.0;
  return std::exp(-beta_ / 8.0 * std::exp(z) + 2.0 * c1_ * z - log_norm_);
}

double ZStationary::cdf(double z) const {
  if (z <= 0.0) return 0.0;
  const double v = beta_ / 8.0 * std::exp(z);
  return 1.0 - boost::math::gamma_q(2.0 * c1_, v) / upper_at_zero_;
}

double ZStationary::quantile(double p) const {
  if (!(p >= 0.0 && p < 1.0)) throw DomainError("ZStationary::quantile: p must be in [0, 1)");
  if (p == 0.0) return 0.0;
  const double v = boost::math::gamma_q_inv(2.0 * c1_, (1.0 - p) * upper_at_zero_);
  return std::max(0.0, std::log(8.0 / beta_ * v));
}

sde::SdePath simulate_Z(double z0, double beta, double c1, double horizon,
                        const sde::NoiseStream& stream, double dt) {
  if (!(z0 >= 0.0)) throw ConfigError("simulate_Z: start must be >= 0");
  const auto grid = sde::TimeGrid::make(0.0, horizon, dt);
  sde::BrownianTree tree(stream);
  const sde::Refinement opt{0.25, 0, 30};
  sde::SdePath path;
  path.grid = grid;
  path.times = {0.0};
  path.values = {z0};
  double z = z0;
  auto refine = [&](double, double h) { return std::abs(z_drift(z, beta, c1)) * h > opt.threshold; };
  auto leaf = [&](double t, double h, const sde::Increment& dw) {
    z = std::abs(z + z_drift(z, beta, c1) * h + dw[0]);
    if (!std::isfinite(z)) throw NumericalError("simulate_Z: non-finite state");
    path.times.push_back(t + h);
    path.values.push_back(z);
    return true;
  };
  for (std::size_t i = 0; i < grid.n_steps; ++i) {
    const double h = grid.step_length(i);
    sde::walk_step(tree, i, grid.time(i), h, tree.coarse(i, h), opt, refine, leaf);
  }
  path.terminal = sde::Alive{z};
  return path;
}

std::vector<double> z_terminal_samples(double beta, double c1, double z0, double burn_in,
                                       std::size_t n, std::uint64_t seed, double dt,
                                       unsigned threads) {
  if (!(z0 >= 0.0)) throw ConfigError("z_terminal_samples: start must be >= 0");
  const auto grid = sde::TimeGrid::make(0.0, burn_in, dt);
  const sde::Refinement opt{0.25, 0, 30};
  std::vector<double> out(n);
  parallel_for(n, threads, [&](std::size_t k) {
    sde::BrownianTree tree(sde::NoiseStream{seed, k, 1});
    double z = z0;
    auto refine = [&](double, double h) {
      return std::abs(z_drift(z, beta, c1)) * h > opt.threshold;
    };
    auto leaf = [&](double, double h, const sde::Increment& dw) {
      z = std::abs(z + z_drift(z, beta, c1) * h + dw[0]);
      return true;
    };
    for (std::size_t i = 0; i < grid.n_steps; ++i) {
      const double h = grid.step_length(i);
      sde::walk_step(tree, i, grid.time(i), h, tree.coarse(i, h), opt, refine, leaf);
    }
    if (!std::isfinite(z)) throw NumericalError("z_terminal_samples: non-finite state", k);
    out[k] = z;
  });
  return out;
}

numerics::TestResult z_chi_square(const std::vector<double>& samples, double beta, double c1,
                                  int bins) {
  if (bins < 2) throw ConfigError("z_chi_square: need at least two bins");
  if (samples.size() < static_cast<std::size_t>(5 * bins)) {
    throw ConfigError("z_chi_square: too few samples for the bin count");
  }
  const ZStationary g(beta, c1);
  std::vector<double> edges;
  for (int b = 1; b < bins; ++b) edges.push_back(g.quantile(static_cast<double>(b) / bins));
  std::vector<double> observed(bins, 0.0);
  for (double z : samples) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), z);
    observed[static_cast<std::size_t>(it - edges.begin())] += 1.0;
  }
  const std::vector<double> expected(bins, static_cast<double>(samples.size()) / bins);
  return numerics::chi_square(observed, expected, 1);
}

ShiftedCoupling simulate_shifted_coupling(double beta, double T1, double T2, double z0, double c1,
                                          const sde::NoiseStream& stream, const TiltConfig& cfg) {
  if (!(T1 > 0.0 && T2 > T1)) throw ConfigError("shifted coupling needs 0 < T1 < T2");
  if (!(z0 >= 0.0)) throw ConfigError("shifted coupling: Z must start at or above 0");
  const double gap_steps = (T2 - T1) / cfg.dt;
  const auto k0 = static_cast<std::size_t>(std::llround(gap_steps));
  if (std::abs(gap_steps - static_cast<double>(k0)) > 1e-6) {
    throw ConfigError("shifted coupling: T2 - T1 must be a multiple of dt");
  }
  const ModelParams p1(beta, std::exp(0.25 * beta * T1));
  const ModelParams p2(beta, std::exp(0.25 * beta * T2));
  const double delta = logtan::warm_start_delta(p2, cfg.warm_target);
  if (!(delta < T1)) throw ConfigError("shifted coupling: T1 shorter than the warm-start delta");
  const double x1 = logtan::warm_start(p1, delta).state;
  const double x2 = logtan::warm_start(p2, delta).state;

  const TiltKernel kernel(beta);
  const double tau0 = -T2 + delta;
  const auto grid = sde::TimeGrid::make(tau0, 0.0, cfg.dt);
  if (k0 >= grid.n_steps) throw ConfigError("shifted coupling: T1 too short for the grid");

  ShiftedCoupling out;
  out.T1 = T1;
  out.T2 = T2;
  out.delta = delta;
  out.tau = {tau0};
  out.y1 = {std::nan("")};
  out.y2 = {x2};
  out.z = {z0};

  double y1 = std::nan("");
  double y2 = x2;
  double z = z0;
  bool y1_on = false;
  auto F_of = [beta](double tau) { return 0.25 * beta * std::exp(-0.25 * beta * tau); };
  auto need = [&](double F, double x) {
    const auto pt = kernel.at(x);
    return std::max(std::abs(kernel.drift(F, pt)), 0.5 * F * pt.cosh_x);
  };
  sde::BrownianTree tree(stream);
  const sde::Refinement opt{cfg.refine_threshold, cfg.min_depth, cfg.max_depth};
  auto refine = [&](double tau, double h) {
    const double F = F_of(tau);
    double b = std::max(need(F, y2), std::max(std::abs(z_drift(z, beta, c1)), need(F, z)));
    if (y1_on) b = std::max(b, need(F, y1));
    return b * h > opt.threshold;
  };
  auto leaf = [&](double tau, double h, const sde::Increment& dw) {
    const double F = F_of(tau);
    y2 += kernel.drift(F, kernel.at(y2)) * h + dw[0];
    if (y1_on) y1 += kernel.drift(F, kernel.at(y1)) * h + dw[0];
    z = std::abs(z + z_drift(z, beta, c1) * h + dw[0]);
    if (!std::isfinite(y2) || !std::isfinite(z) || (y1_on && !std::isfinite(y1))) {
      throw NumericalError("shifted coupling: non-finite state");
    }
    out.tau.push_back(tau + h);
    out.y1.push_back(y1);
    out.y2.push_back(y2);
    out.z.push_back(z);
    return true;
  };
  for (std::size_t i = 0; i < grid.n_steps; ++i) {
    if (i == k0) {
      y1_on = true;
      y1 = x1;
      out.y1.back() = y1;
    }
    const double h = grid.step_length(i);
    sde::walk_step(tree, i, grid.time(i), h, tree.coarse(i, h), opt, refine, leaf);
  }
  return out;
}

CouplingViolations count_violations(const ShiftedCoupling& c, double tol) {
  CouplingViolations v;
  for (std::size_t i = 0; i < c.tau.size(); ++i) {
    const double slack = tol * (1.0 + std::abs(c.y2[i]));
    if (!std::isnan(c.y1[i]) && c.y1[i] > c.y2[i] + slack) ++v.y_order;
    if (c.y2[i] > c.z[i] + slack) ++v.z_dominance;
    if (!std::isnan(c.y1[i]) && c.y1[i] > c.z[i] + slack) ++v.z_dominance;
  }
  return v;
}

}  // namespace carousel::tilt
