#include "carousel/tilt/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "carousel/errors.hpp"
#include "carousel/logtan/logtan.hpp"
#include "carousel/parallel.hpp"
#include "carousel/sde/integrate.hpp"
#include "carousel/sde/time_grid.hpp"

namespace carousel::tilt {

namespace {

void check_config(const TiltConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw ConfigError("tilt: dt must be positive");
  if (!(cfg.refine_threshold > 0.0)) throw ConfigError("tilt: refine_threshold must be positive");
  if (cfg.min_depth < 0 || cfg.max_depth < cfg.min_depth || cfg.max_depth > 60) {
    throw ConfigError("tilt: need 0 <= min_depth <= max_depth <= 60");
  }
}

struct Start {
  double t0;
  double x0;
};

Start start_of(const ModelParams& params, const TiltConfig& cfg) {
  if (!(params.lambda > 1.0)) throw ConfigError("the tilted diffusion needs lambda > 1");
  const double delta = logtan::warm_start_delta(params, cfg.warm_target);
  const auto ws = logtan::warm_start(params, delta);
  if (!(ws.time < params.T())) throw ConfigError("lambda too small: warm-start delta exceeds T");
  return Start{ws.time, ws.state};
}

// Walks Y over [t0, T]; on_point(t, x, phi) is called at the start and after every leaf.
template <class OnPoint>
double walk_Y(const ModelParams& params, const TiltKernel& kernel, Start st,
              const sde::NoiseStream& stream, const TiltConfig& cfg, OnPoint&& on_point) {
  const double T = params.T();
  const auto grid = sde::TimeGrid::make(st.t0, T, cfg.dt);
  sde::BrownianTree tree(stream);
  const sde::Refinement opt{cfg.refine_threshold, cfg.min_depth, cfg.max_depth};

  double x = st.x0;
  TiltPoint pt = kernel.at(x);
  double cur_t = st.t0;
  double cur_F = params.lambda * speed_f(cur_t, params.beta);
  auto F_at = [&](double t) {
    if (t != cur_t) {
      cur_t = t;
      cur_F = params.lambda * speed_f(t, params.beta);
    }
    return cur_F;
  };
  on_point(st.t0, x, kernel.phi(2.0 / cur_F, pt));

  std::size_t step = 0;
  auto refine = [&](double t, double h) {
    const double F = F_at(t);
    const double b = std::max(std::abs(kernel.drift(F, pt)), 0.5 * F * pt.cosh_x);
    return b * h > opt.threshold;
  };
  auto leaf = [&](double t, double h, const sde::Increment& dw) {
    x += kernel.drift(F_at(t), pt) * h + dw[0];
    if (!(x < cfg.x_guard)) {
      if (std::isnan(x)) {
        throw NumericalError("Y: non-finite state at step " + std::to_string(step), step);
      }
      throw InvariantError("Y crossed " + std::to_string(cfg.x_guard) + " at t = " +
                           std::to_string(t + h) + "; the tilted drift must prevent this");
    }
    pt = kernel.at(x);
    const double F1 = F_at(t + h);
    on_point(t + h, x, kernel.phi(2.0 / F1, pt));
    return true;
  };
  for (; step < grid.n_steps; ++step) {
    const double h = grid.step_length(step);
    sde::walk_step(tree, step, grid.time(step), h, tree.coarse(step, h), opt, refine, leaf);
  }
  return x;
}

}  // namespace

sde::SdePath simulate_Y(const ModelParams& params, const sde::NoiseStream& stream,
                        const TiltConfig& cfg) {
  check_config(cfg);
  const auto st = start_of(params, cfg);
  const TiltKernel kernel(params.beta);
  sde::SdePath path;
  path.grid = sde::TimeGrid::make(st.t0, params.T(), cfg.dt);
  path.times.reserve(path.grid.n_steps + 1);
  path.values.reserve(path.grid.n_steps + 1);
  const double y = walk_Y(params, kernel, st, stream, cfg, [&](double t, double x, double) {
    path.times.push_back(t);
    path.values.push_back(x);
  });
  path.times.back() = params.T();
  path.terminal = sde::Alive{y};
  return path;
}

YOutcome run_Y(const ModelParams& params, const sde::NoiseStream& stream, const TiltConfig& cfg) {
  check_config(cfg);
  const auto st = start_of(params, cfg);
  const TiltKernel kernel(params.beta);
  YOutcome out;
  double prev_t = 0.0;
  double prev_phi = 0.0;
  bool first = true;
  out.y_T = walk_Y(params, kernel, st, stream, cfg, [&](double t, double, double ph) {
    if (!first) {
      out.psi_integral += 0.5 * (t - prev_t) * (prev_phi + ph);
      ++out.n_leaves;
    }
    first = false;
    prev_t = t;
    prev_phi = ph;
  });
  return out;
}

namespace {

double table_sensitivity(const logtan::P1Table& table, const std::vector<double>& y_T,
                         const std::vector<double>& psi, double offset) {
  const double top = *std::max_element(psi.begin(), psi.end());
  std::vector<double> e(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) e[i] = std::exp(psi[i] - top);
  const double h = 1e-4;
  double var = 0.0;
  logtan::P1Table up = table, down = table;
  for (std::size_t k = 0; k < table.values.size(); ++k) {
    const double se = table.stderrs[k];
    if (!(se > 0.0)) continue;
    up.values[k] = table.values[k] + h;
    down.values[k] = table.values[k] - h;
    up.finalize();
    down.finalize();
    double d = 0.0;
    for (std::size_t i = 0; i < y_T.size(); ++i) {
      d += e[i] * (up(y_T[i]) - down(y_T[i]));
    }
    d /= 2.0 * h * static_cast<double>(y_T.size());
    var += d * d * se * se;
    up.values[k] = table.values[k];
    down.values[k] = table.values[k];
  }
  return std::sqrt(var) * std::exp(top + offset);
}

}  // namespace

ISResult estimate_p_lambda_IS(const ModelParams& params, const logtan::P1Table& table,
                              std::size_t n_samples, std::uint64_t seed, const TiltConfig& cfg) {
  check_config(cfg);
  table.require_beta(params.beta);
  if (n_samples < 2) throw ConfigError("estimate_p_lambda_IS: n_samples must be >= 2");
  const auto st = start_of(params, cfg);

  ISResult r;
  r.delta = st.t0;
  r.log_prefactor = params.log_leading_order();
  r.offset = girsanov_offset(params, st.t0, st.x0);
  r.entrance_budget = st.t0 * phi_bound(params.beta)(params.T() - st.t0);

  std::vector<double> log_w(n_samples);
  std::vector<double> y_T(n_samples);
  std::vector<double> psi(n_samples);
  std::vector<double> leaves(n_samples);
  parallel_for(n_samples, cfg.threads, [&](std::size_t i) {
    const auto y = run_Y(params, sde::NoiseStream{seed, i, 1}, cfg);
    y_T[i] = y.y_T;
    psi[i] = psi_terminal(y.y_T, params.beta) + y.psi_integral;
    const double p1 = table(y.y_T);
    log_w[i] = p1 > 0.0 ? std::log(p1) + psi[i] + r.offset
                        : -std::numeric_limits<double>::infinity();
    leaves[i] = static_cast<double>(y.n_leaves);
  });

  // Scale by the largest log-weight before exponentiating.
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_samples; ++i) {
    if (std::isnan(log_w[i]) || log_w[i] == std::numeric_limits<double>::infinity()) {
      throw InvariantError("importance weight is not finite at path " + std::to_string(i));
    }
    top = std::max(top, log_w[i]);
  }
  if (top > 700.0) {
    throw InvariantError("importance weight overflow: log weight " + std::to_string(top));
  }
  std::vector<double> w(n_samples);
  const double base = std::isfinite(top) ? top : 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) w[i] = std::exp(log_w[i] - base);
  const auto s = summarize(w);
  const double scale = std::exp(base);
  r.m = s.mean * scale;
  r.m_stderr = s.stderr_ * scale;
  r.max_psi = *std::max_element(psi.begin(), psi.end());
  r.mean_leaves = summarize(leaves).mean;
  r.m_table_stderr = table_sensitivity(table, y_T, psi, r.offset);
  const double pre = std::exp(r.log_prefactor);
  r.estimate = GapEstimate{pre * r.m, pre * std::hypot(r.m_stderr, r.m_table_stderr), n_samples,
                           Method::importance, seed};
  return r;
}

KappaResult estimate_kappa(double beta, const std::vector<double>& lambdas,
                           const logtan::P1Table& table, std::size_t n_samples, std::uint64_t seed,
                           const TiltConfig& cfg) {
  if (lambdas.empty()) throw ConfigError("estimate_kappa: empty lambda list");
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    if (!(lambdas[j] > 1.0)) throw ConfigError("estimate_kappa: every lambda must exceed 1");
    if (j > 0 && !(lambdas[j] > lambdas[j - 1])) {
      throw ConfigError("estimate_kappa: lambda list must be increasing");
    }
  }
  if (lambdas.back() < 4.0 * lambdas.front()) {
    throw ConfigError("estimate_kappa: lambda list must span at least a factor of 4");
  }
  KappaResult k;
  k.lambdas = lambdas;
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    auto r = estimate_p_lambda_IS(ModelParams(beta, lambdas[j]), table, n_samples, seed + j, cfg);
    k.m.push_back(r.m);
    k.m_stderr.push_back(r.m_stderr);
    k.runs.push_back(std::move(r));
  }
  for (std::size_t j = 1; j < lambdas.size(); ++j) {
    const double drop = k.m[j - 1] - k.m[j];
    if (drop > 3.0 * std::hypot(k.m_stderr[j - 1], k.m_stderr[j])) k.non_monotone_steps.push_back(j);
  }
  k.kappa_hat = k.m.back();
  k.kappa_stderr = std::hypot(k.m_stderr.back(), k.runs.back().m_table_stderr);
  return k;
}

}  // namespace carousel::tilt
