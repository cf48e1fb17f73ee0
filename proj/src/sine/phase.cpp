#include "carousel/sine/phase.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "carousel/errors.hpp"
#include "carousel/parallel.hpp"
#include "carousel/sde/integrate.hpp"

namespace carousel::sine {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

sde::TimeGrid phase_grid(double lambda, double horizon, const PhaseConfig& cfg) {
  const double dt = cfg.dt > 0.0 ? cfg.dt : default_phase_dt(lambda);
  return sde::TimeGrid::make(0.0, horizon, dt);
}

void check_horizon(double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ConfigError("phase horizon must be positive and finite");
  }
}

// Slack for horizons computed by required_horizon, whose round trip through exp/log
// can land an ulp short.
constexpr double kToleranceSlack = 1.0 + 1e-9;

// λ f at every grid point; shared by all paths on the grid.
std::vector<double> drift_table(const ModelParams& p, const sde::TimeGrid& g) {
  std::vector<double> out(g.n_steps + 1);
  for (std::size_t i = 0; i <= g.n_steps; ++i) out[i] = p.lambda * speed_f(g.time(i), p.beta);
  return out;
}

double run_phase(const ModelParams& p, const sde::TimeGrid& g, const std::vector<double>& lf,
                 sde::BrownianTree& tree, int refine_levels, std::vector<double>* times,
                 std::vector<double>* values) {
  double a = 0.0;
  if (refine_levels == 0 && times == nullptr) {
    for (std::size_t i = 0; i < g.n_steps; ++i) {
      const double h = g.step_length(i);
      const double dw = tree.coarse(i, h)[0];
      a += lf[i] * h + 2.0 * std::sin(0.5 * a) * dw;
    }
    return a;
  }
  const sde::Refinement opt{0.0, refine_levels, refine_levels};
  auto never = [](double, double) { return false; };
  auto leaf = [&](double t, double h, const sde::Increment& dw) {
    a += p.lambda * speed_f(t, p.beta) * h + 2.0 * std::sin(0.5 * a) * dw[0];
    if (times) {
      times->push_back(t + h);
      values->push_back(a);
    }
    return true;
  };
  for (std::size_t i = 0; i < g.n_steps; ++i) {
    const double h = g.step_length(i);
    sde::walk_step(tree, i, g.time(i), h, tree.coarse(i, h), opt, never, leaf);
  }
  return a;
}

}  // namespace

double default_phase_dt(double lambda) {
  return lambda > 0.0 ? std::min(1e-3, 0.1 / lambda) : 1e-3;
}

double required_horizon(const ModelParams& params, double tolerance) {
  if (!(tolerance > 0.0)) throw ConfigError("drift tolerance must be positive");
  if (params.lambda <= tolerance) return 1e-3;
  return 4.0 / params.beta * std::log(params.lambda / tolerance);
}

double residual_drift_bound(const ModelParams& params, double t_end) {
  return params.lambda * std::exp(-0.25 * params.beta * t_end);
}

PhasePath simulate_phase(const ModelParams& params, double horizon, const sde::NoiseStream& stream,
                         const PhaseConfig& cfg) {
  check_horizon(horizon);
  const auto grid = phase_grid(params.lambda, horizon, cfg);
  sde::BrownianTree tree(stream);
  PhasePath out;
  out.lambda = params.lambda;
  out.residual_drift_bound = residual_drift_bound(params, horizon);
  out.path.grid = grid;
  out.path.times.push_back(0.0);
  out.path.values.push_back(0.0);
  const auto lf = drift_table(params, grid);
  const double a = run_phase(params, grid, lf, tree, std::max(cfg.refine_levels, 0),
                             &out.path.times, &out.path.values);
  if (!std::isfinite(a)) throw NumericalError("simulate_phase: non-finite phase", stream.stream_id);
  out.path.terminal = sde::Alive{a};
  return out;
}

double terminal_weight_k(double alpha, int k) {
  if (k < 0) throw DomainError("terminal_weight_k: k must be non-negative");
  const double d = std::abs(alpha - kTwoPi * k) / kTwoPi;
  return d >= 1.0 ? 0.0 : 1.0 - d;
}

double terminal_weight_k(const PhasePath& phase, int k, double tolerance) {
  if (phase.residual_drift_bound > tolerance * kToleranceSlack) {
    throw ConfigError("terminal_weight_k: residual drift " +
                      std::to_string(phase.residual_drift_bound) + " exceeds tolerance");
  }
  return terminal_weight_k(phase.path.final_value(), k);
}

std::vector<double> simulate_terminal_phases(const ModelParams& params, std::size_t n_samples,
                                             std::uint64_t seed, const PhaseConfig& cfg) {
  const double horizon = required_horizon(params, cfg.drift_tolerance);
  const auto grid = phase_grid(params.lambda, horizon, cfg);
  const auto lf = drift_table(params, grid);
  std::vector<double> alpha(n_samples);
  const int levels = std::max(cfg.refine_levels, 0);
  parallel_for(n_samples, cfg.threads, [&](std::size_t i) {
    sde::BrownianTree tree(sde::NoiseStream{seed, i, 1});
    const double a = run_phase(params, grid, lf, tree, levels, nullptr, nullptr);
    if (!std::isfinite(a)) throw NumericalError("phase path produced a non-finite value", i);
    alpha[i] = a;
  });
  return alpha;
}

DirectRun estimate_gap_direct_all(const ModelParams& params, int k_max, std::size_t n_samples,
                                  std::uint64_t seed, const PhaseConfig& cfg) {
  if (n_samples < 1) throw ConfigError("estimate_gap_direct: n_samples must be >= 1");
  if (k_max < 0) throw DomainError("estimate_gap_direct: k must be non-negative");
  DirectRun run;
  run.horizon = required_horizon(params, cfg.drift_tolerance);
  run.dt = cfg.dt > 0.0 ? cfg.dt : default_phase_dt(params.lambda);
  run.bias_bound = residual_drift_bound(params, run.horizon) / kTwoPi;
  const auto alpha = simulate_terminal_phases(params, n_samples, seed, cfg);

  std::vector<double> w(n_samples);
  for (int k = 0; k <= k_max; ++k) {
    for (std::size_t i = 0; i < n_samples; ++i) w[i] = terminal_weight_k(alpha[i], k);
    const auto s = summarize(w);
    run.by_k.push_back(GapEstimate{s.mean, s.stderr_, n_samples, Method::direct, seed});
  }
  for (std::size_t i = 0; i < n_samples; ++i) w[i] = alpha[i] / kTwoPi;
  const auto c = summarize(w);
  run.mean_count = c.mean;
  run.mean_count_stderr = c.stderr_;
  return run;
}

GapEstimate estimate_gap_direct(const ModelParams& params, int k, std::size_t n_samples,
                                std::uint64_t seed, const PhaseConfig& cfg) {
  if (k < 0) throw DomainError("estimate_gap_direct: k must be non-negative");
  if (n_samples < 1) throw ConfigError("estimate_gap_direct: n_samples must be >= 1");
  const double horizon = required_horizon(params, cfg.drift_tolerance);
  const auto grid = phase_grid(params.lambda, horizon, cfg);
  const auto lf = drift_table(params, grid);
  std::vector<double> w(n_samples);
  const int levels = std::max(cfg.refine_levels, 0);
  parallel_for(n_samples, cfg.threads, [&](std::size_t i) {
    sde::BrownianTree tree(sde::NoiseStream{seed, i, 1});
    const double a = run_phase(params, grid, lf, tree, levels, nullptr, nullptr);
    if (!std::isfinite(a)) throw NumericalError("phase path produced a non-finite value", i);
    w[i] = terminal_weight_k(a, k);
  });
  const auto s = summarize(w);
  return GapEstimate{s.mean, s.stderr_, n_samples, Method::direct, seed};
}

namespace {

std::vector<double> run_family(const std::vector<double>& lambdas, double beta, double horizon,
                               const sde::NoiseStream& stream, const PhaseConfig& cfg,
                               std::vector<PhasePath>* record) {
  if (lambdas.empty()) throw ConfigError("phase family: lambda grid must be nonempty");
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    if (!(lambdas[j] >= 0.0)) throw ConfigError("phase family: lambdas must be non-negative");
    if (j > 0 && !(lambdas[j] > lambdas[j - 1])) {
      throw ConfigError("phase family: lambda grid must be increasing");
    }
  }
  if (stream.dimension != 2) throw ConfigError("phase family needs a two-dimensional stream");
  const ModelParams top(beta, lambdas.back());
  check_horizon(horizon);
  const auto grid = phase_grid(top.lambda, horizon, cfg);
  const std::size_t m = lambdas.size();
  std::vector<double> a(m, 0.0);
  if (record) {
    record->assign(m, PhasePath{});
    for (std::size_t j = 0; j < m; ++j) {
      auto& p = (*record)[j];
      p.lambda = lambdas[j];
      p.residual_drift_bound = residual_drift_bound(ModelParams(beta, lambdas[j]), horizon);
      p.path.grid = grid;
      p.path.times.reserve(grid.n_steps + 1);
      p.path.values.reserve(grid.n_steps + 1);
      p.path.times.push_back(0.0);
      p.path.values.push_back(0.0);
    }
  }
  sde::BrownianTree tree(stream);
  const int levels = std::max(cfg.refine_levels, 0);
  const sde::Refinement opt{0.0, levels, levels};
  auto never = [](double, double) { return false; };
  auto leaf = [&](double t, double h, const sde::Increment& dz) {
    const double f = speed_f(t, beta) * h;
    for (std::size_t j = 0; j < m; ++j) {
      const double c = std::cos(a[j]);
      const double s = std::sin(a[j]);
      a[j] += lambdas[j] * f + (c - 1.0) * dz[0] + s * dz[1];
      if (record) {
        (*record)[j].path.times.push_back(t + h);
        (*record)[j].path.values.push_back(a[j]);
      }
    }
    return true;
  };
  for (std::size_t i = 0; i < grid.n_steps; ++i) {
    const double h = grid.step_length(i);
    sde::walk_step(tree, i, grid.time(i), h, tree.coarse(i, h), opt, never, leaf);
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!std::isfinite(a[j])) throw NumericalError("phase family: non-finite phase", stream.stream_id);
    if (record) (*record)[j].path.terminal = sde::Alive{a[j]};
  }
  return a;
}

}  // namespace

std::vector<PhasePath> simulate_phase_family(const std::vector<double>& lambda_grid, double beta,
                                             double horizon, const sde::NoiseStream& stream,
                                             const PhaseConfig& cfg) {
  std::vector<PhasePath> out;
  run_family(lambda_grid, beta, horizon, stream, cfg, &out);
  return out;
}

std::vector<double> phase_family_terminal(const std::vector<double>& lambda_grid, double beta,
                                          double horizon, const sde::NoiseStream& stream,
                                          const PhaseConfig& cfg) {
  return run_family(lambda_grid, beta, horizon, stream, cfg, nullptr);
}

PointConfiguration sample_sine_beta(double lambda_max, double beta, std::size_t resolution,
                                    std::uint64_t seed, const PhaseConfig& cfg) {
  if (resolution < 2) throw ConfigError("sample_sine_beta: resolution must be >= 2");
  if (!(lambda_max > 0.0)) throw ConfigError("sample_sine_beta: lambda_max must be positive");
  std::vector<double> grid(resolution);
  for (std::size_t j = 0; j < resolution; ++j) {
    grid[j] = lambda_max * static_cast<double>(j) / static_cast<double>(resolution - 1);
  }
  const double horizon = required_horizon(ModelParams(beta, lambda_max), cfg.drift_tolerance);
  const auto alpha = phase_family_terminal(grid, beta, horizon, sde::NoiseStream{seed, 0, 2}, cfg);

  PointConfiguration out;
  out.cell_width = lambda_max / static_cast<double>(resolution - 1);
  out.counts.resize(resolution);
  for (std::size_t j = 0; j < resolution; ++j) out.counts[j] = std::lround(alpha[j] / kTwoPi);
  for (std::size_t j = 1; j < resolution; ++j) {
    const long inc = out.counts[j] - out.counts[j - 1];
    const double mid = 0.5 * (grid[j - 1] + grid[j]);
    for (long r = 0; r < inc; ++r) out.points.push_back(mid);
  }
  return out;
}

sde::SdePath simulate_driftless_phase(double a0, double horizon, const sde::NoiseStream& stream,
                                      double dt, double eps) {
  const auto grid = sde::TimeGrid::make(0.0, horizon, dt);
  auto drift = [](double, double) { return 0.0; };
  auto diffusion = [](double, double a) { return 2.0 * std::sin(0.5 * a); };
  auto stop = [eps](double t, double a) -> std::optional<sde::Terminal> {
    if (a <= eps) return sde::Terminal{sde::Absorbed{0.0, t}};
    if (a >= kTwoPi - eps) return sde::Terminal{sde::Absorbed{kTwoPi, t}};
    return std::nullopt;
  };
  return sde::integrate(drift, diffusion, a0, grid, stream, stop);
}

}  // namespace carousel::sine
