#include "carousel/logtan/logtan.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "carousel/errors.hpp"
#include "carousel/parallel.hpp"
#include "carousel/sde/integrate.hpp"

namespace carousel::logtan {

namespace {

constexpr double kOverflowX = 700.0;

// (lambda/2) f(t) cosh x + tanh(x)/2 from one exponential; valid for |x| <= 700.
inline double fast_drift(double F, double x) {
  const double e = std::exp(x);
  const double ie = 1.0 / e;
  return 0.25 * F * (e + ie) + 0.5 * (e - ie) / (e + ie);
}

inline double drift_at(double t, double x, const ModelParams& p) {
  if (std::abs(x) > kOverflowX) return std::numeric_limits<double>::infinity();
  return fast_drift(p.lambda * speed_f(t, p.beta), x);
}

sde::Refinement refinement_of(const LogtanConfig& cfg) {
  return sde::Refinement{cfg.refine_threshold, cfg.min_depth, cfg.max_depth};
}

void check_config(const LogtanConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw ConfigError("logtan: dt must be positive");
  if (!(cfg.x_max > 0.0)) throw ConfigError("logtan: x_max must be positive");
  if (!(cfg.refine_threshold > 0.0)) throw ConfigError("logtan: refine_threshold must be positive");
  if (cfg.min_depth < 0 || cfg.max_depth < cfg.min_depth || cfg.max_depth > 60) {
    throw ConfigError("logtan: need 0 <= min_depth <= max_depth <= 60");
  }
}

}  // namespace

double logtan_drift(double t, double x, const ModelParams& params) {
  if (!std::isfinite(x) && !(x > 0.0)) throw DomainError("logtan_drift: x must be finite");
  if (x > kOverflowX) return std::numeric_limits<double>::infinity();
  return 0.5 * params.lambda * speed_f(t, params.beta) * std::cosh(x) + 0.5 * std::tanh(x);
}

double warm_start_delta(const ModelParams& params, double target) {
  if (!(params.lambda > 0.0)) throw ConfigError("warm start needs lambda > 0");
  if (!(target > 0.0 && target <= 0.01)) throw ConfigError("warm start target must be in (0, 0.01]");
  const double frac = std::min(target / params.lambda, 0.5);
  return -4.0 / params.beta * std::log1p(-frac);
}

WarmStart warm_start(const ModelParams& params, double delta) {
  if (!(params.lambda > 0.0)) throw ConfigError("warm start needs lambda > 0");
  if (!(delta > 0.0)) throw ConfigError("warm start delta must be positive");
  const double phase = params.lambda * cumulative_f(delta, params.beta);
  if (phase > 0.01 * (1.0 + 1e-12)) {
    throw ConfigError("warm start delta too large: lambda*F(delta) = " + std::to_string(phase) +
                      " exceeds 0.01");
  }
  return WarmStart{std::log(std::tan(0.25 * phase)), delta};
}

XOutcome run_X(double x0, double t0, double t_end, const ModelParams& params,
               sde::BrownianTree& tree, const LogtanConfig& cfg) {
  if (!std::isfinite(x0)) throw ConfigError("run_X: start must be finite");
  const auto grid = sde::TimeGrid::make(t0, t_end, cfg.dt);
  const auto opt = refinement_of(cfg);
  double x = x0;
  XOutcome out;
  if (x >= cfg.x_max) return XOutcome{true, t0, x};
  double cached_t = std::numeric_limits<double>::quiet_NaN();
  double cached_b = 0.0;
  auto drift = [&](double t) {
    if (t != cached_t) {
      cached_t = t;
      cached_b = drift_at(t, x, params);
    }
    return cached_b;
  };
  std::size_t step = 0;
  auto refine = [&](double t, double h) { return std::abs(drift(t)) * h > opt.threshold; };
  auto leaf = [&](double t, double h, const sde::Increment& dw) {
    x += drift(t) * h + dw[0];
    cached_t = std::numeric_limits<double>::quiet_NaN();
    if (x >= cfg.x_max) {
      out.blown_up = true;
      out.time = t + h;
      return false;
    }
    if (!std::isfinite(x)) {
      throw NumericalError("run_X: non-finite state at step " + std::to_string(step), step);
    }
    return true;
  };
  for (; step < grid.n_steps; ++step) {
    const double h = grid.step_length(step);
    if (!sde::walk_step(tree, step, grid.time(step), h, tree.coarse(step, h), opt, refine, leaf)) {
      return out;
    }
  }
  out.time = t_end;
  out.x = x;
  return out;
}

sde::SdePath simulate_X(double x0, const ModelParams& params, double horizon,
                        const sde::NoiseStream& stream, const LogtanConfig& cfg) {
  check_config(cfg);
  if (!(horizon > 0.0)) throw ConfigError("simulate_X: horizon must be positive");
  double t0 = 0.0;
  if (std::isinf(x0) && x0 < 0.0) {
    const auto ws = warm_start(params, warm_start_delta(params, cfg.warm_target));
    if (ws.time >= horizon) throw ConfigError("simulate_X: horizon shorter than warm-start delta");
    x0 = ws.state;
    t0 = ws.time;
  } else if (!std::isfinite(x0)) {
    throw ConfigError("simulate_X: start must be finite or the -infinity marker");
  }
  const auto grid = sde::TimeGrid::make(t0, horizon, cfg.dt);
  auto drift = [&](double t, double x) { return drift_at(t, x, params); };
  auto unit = [](double, double) { return 1.0; };
  const double x_max = cfg.x_max;
  auto stop = [x_max](double t, double x) -> std::optional<sde::Terminal> {
    if (x >= x_max) return sde::Terminal{sde::BlownUp{t}};
    return std::nullopt;
  };
  if (x0 >= x_max) {
    sde::SdePath p;
    p.grid = grid;
    p.times = {t0};
    p.values = {x0};
    p.terminal = sde::BlownUp{t0};
    return p;
  }
  return sde::integrate_adaptive(drift, unit, x0, grid, stream, stop, refinement_of(cfg));
}

std::vector<sde::SdePath> simulate_X_coupled(const std::vector<double>& x0s,
                                             const ModelParams& params, double horizon,
                                             const sde::NoiseStream& stream,
                                             const LogtanConfig& cfg) {
  check_config(cfg);
  if (x0s.empty()) throw ConfigError("simulate_X_coupled: no starting points");
  for (double v : x0s) {
    if (!std::isfinite(v)) throw ConfigError("simulate_X_coupled: starts must be finite");
  }
  const auto grid = sde::TimeGrid::make(0.0, horizon, cfg.dt);
  const std::size_t m = x0s.size();
  std::vector<sde::SdePath> paths(m);
  std::vector<double> x = x0s;
  std::vector<bool> alive(m, true);
  for (std::size_t j = 0; j < m; ++j) {
    paths[j].grid = grid;
    paths[j].times = {0.0};
    paths[j].values = {x[j]};
    if (x[j] >= cfg.x_max) {
      alive[j] = false;
      paths[j].terminal = sde::BlownUp{0.0};
    }
  }
  sde::BrownianTree tree(stream);
  const auto opt = refinement_of(cfg);
  std::size_t step = 0;
  auto refine = [&](double t, double h) {
    for (std::size_t j = 0; j < m; ++j) {
      if (alive[j] && std::abs(drift_at(t, x[j], params)) * h > opt.threshold) return true;
    }
    return false;
  };
  auto leaf = [&](double t, double h, const sde::Increment& dw) {
    bool any = false;
    for (std::size_t j = 0; j < m; ++j) {
      if (!alive[j]) continue;
      x[j] += drift_at(t, x[j], params) * h + dw[0];
      if (x[j] >= cfg.x_max) {
        alive[j] = false;
        paths[j].terminal = sde::BlownUp{t + h};
        continue;
      }
      if (!std::isfinite(x[j])) {
        throw NumericalError("simulate_X_coupled: non-finite state at step " +
                             std::to_string(step), step);
      }
      paths[j].times.push_back(t + h);
      paths[j].values.push_back(x[j]);
      any = true;
    }
    return any;
  };
  for (; step < grid.n_steps; ++step) {
    const double h = grid.step_length(step);
    if (!sde::walk_step(tree, step, grid.time(step), h, tree.coarse(step, h), opt, refine, leaf)) {
      break;
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (alive[j]) paths[j].terminal = sde::Alive{x[j]};
  }
  return paths;
}

double survival_weight(double x) {
  if (std::isnan(x)) throw NumericalError("survival_weight: NaN state");
  const double w = 1.0 - 2.0 / std::numbers::pi * std::atan(std::exp(x));
  return std::clamp(w, 0.0, 1.0);
}

double p1_default_horizon(double beta, double tolerance) {
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  if (!(tolerance > 0.0 && tolerance < 1.0)) throw ConfigError("tail tolerance must be in (0, 1)");
  return -4.0 / beta * std::log(tolerance);
}

GapEstimate estimate_p1(double x, double beta, std::size_t n_samples, double horizon,
                        std::uint64_t seed, const LogtanConfig& cfg, std::uint64_t stream_base) {
  check_config(cfg);
  if (n_samples < 1) throw ConfigError("estimate_p1: n_samples must be >= 1");
  if (std::exp(-0.25 * beta * horizon) > 1e-4 * (1.0 + 1e-9)) {
    throw ConfigError("estimate_p1: horizon " + std::to_string(horizon) +
                      " leaves tail drift above 1e-4; need at least " +
                      std::to_string(p1_default_horizon(beta)));
  }
  const ModelParams params(beta, 1.0);
  double x0 = x;
  double t0 = 0.0;
  if (std::isinf(x) && x < 0.0) {
    const auto ws = warm_start(params, warm_start_delta(params, cfg.warm_target));
    x0 = ws.state;
    t0 = ws.time;
  } else if (!std::isfinite(x)) {
    throw ConfigError("estimate_p1: x must be finite or the -infinity marker");
  }
  std::vector<double> w(n_samples);
  parallel_for(n_samples, cfg.threads, [&](std::size_t i) {
    sde::BrownianTree tree(sde::NoiseStream{seed, stream_base + i, 1});
    const auto r = run_X(x0, t0, horizon, params, tree, cfg);
    w[i] = r.blown_up ? 0.0 : survival_weight(r.x);
  });
  const auto s = summarize(w);
  return GapEstimate{s.mean, s.stderr_, n_samples, Method::direct, seed};
}

}  // namespace carousel::logtan
