#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "carousel/errors.hpp"
#include "carousel/sde/noise.hpp"
#include "carousel/sde/path.hpp"
#include "carousel/sde/time_grid.hpp"

namespace carousel::sde {

/// One Euler-Maruyama update: state + drift*dt + diffusion*dW.
inline double euler_step(double state, double drift_value, double diffusion_value, double dW,
                         double dt) {
  if (!(dt > 0.0)) throw ConfigError("euler_step: dt must be positive");
  const auto check = [](double v, const char* name) {
    if (!std::isfinite(v)) {
      throw NumericalError(std::string("euler_step: non-finite ") + name + " = " +
                           std::to_string(v));
    }
  };
  check(state, "state");
  check(drift_value, "drift");
  check(diffusion_value, "diffusion");
  check(dW, "dW");
  check(dt, "dt");
  return state + drift_value * dt + diffusion_value * dW;
}

/// Dyadic refinement policy for stiff drifts. A node of length h is split when
/// depth < min_depth, or when depth < max_depth and the caller's predicate fires.
struct Refinement {
  double threshold = 0.25;
  int min_depth = 0;
  int max_depth = 16;
};

/// Walks coarse step `step` = [t0, t0 + h] with increment w, depth first, left half
/// first. refine(t, h) decides splitting from the caller's current state; leaf(t, h, dw)
/// advances that state and returns false to stop the whole walk. Returns false iff a
/// leaf stopped.
template <class Refine, class Leaf>
bool walk_step(BrownianTree& tree, std::size_t step, double t0, double h, const Increment& w,
               const Refinement& opt, Refine&& refine, Leaf&& leaf) {
  struct Node {
    double t;
    double h;
    Increment w;
    std::uint64_t id;
    int depth;
  };
  std::array<Node, 66> stack;
  int top = 0;
  stack[top++] = Node{t0, h, w, 1, 0};
  while (top > 0) {
    const Node n = stack[--top];
    const bool split = n.depth < opt.max_depth &&
                       (n.depth < opt.min_depth || refine(n.t, n.h));
    if (split) {
      const Increment left = tree.left_half(step, n.id, n.w, n.h);
      const Increment right{n.w[0] - left[0], n.w[1] - left[1]};
      const double half = 0.5 * n.h;
      stack[top++] = Node{n.t + half, half, right, 2 * n.id + 1, n.depth + 1};
      stack[top++] = Node{n.t, half, left, 2 * n.id, n.depth + 1};
    } else if (!leaf(n.t, n.h, n.w)) {
      return false;
    }
  }
  return true;
}

/// Fixed-step Euler-Maruyama for dX = drift(t, X) dt + diffusion(t, X) dW.
///
/// stop_rule(t, x) is consulted after every step and may return a terminal tag that ends
/// the path. A non-finite state that the stop rule does not catch raises NumericalError
/// carrying the step index.
template <class Drift, class Diffusion, class StopRule>
SdePath integrate(Drift&& drift, Diffusion&& diffusion, double x0, const TimeGrid& grid,
                  const NoiseStream& stream, StopRule&& stop_rule,
                  const Refinement& refinement = Refinement{0.25, 0, 0}) {
  BrownianTree tree(stream);
  SdePath path;
  path.grid = grid;
  path.times.reserve(grid.n_steps + 1);
  path.values.reserve(grid.n_steps + 1);
  path.times.push_back(grid.t_start);
  path.values.push_back(x0);

  double x = x0;
  std::optional<Terminal> stopped;
  std::size_t step = 0;
  auto leaf = [&](double t, double h, const Increment& dw) {
    x = x + drift(t, x) * h + diffusion(t, x) * dw[0];
    const double t1 = t + h;
    if (auto term = stop_rule(t1, x)) {
      stopped = *term;
      if (!std::holds_alternative<BlownUp>(*term)) {
        path.times.push_back(t1);
        path.values.push_back(x);
      }
      return false;
    }
    if (!std::isfinite(x)) {
      throw NumericalError("integrate: non-finite state at step " + std::to_string(step), step);
    }
    path.times.push_back(t1);
    path.values.push_back(x);
    return true;
  };
  auto never = [](double, double) { return false; };
  for (; step < grid.n_steps; ++step) {
    const double t = grid.time(step);
    const double h = grid.step_length(step);
    if (!walk_step(tree, step, t, h, tree.coarse(step, h), refinement, never, leaf)) break;
  }
  path.terminal = stopped ? *stopped : Terminal{Alive{x}};
  return path;
}

/// Adaptive variant: a step is subdivided while |drift(t, x)| * h > refinement.threshold.
template <class Drift, class Diffusion, class StopRule>
SdePath integrate_adaptive(Drift&& drift, Diffusion&& diffusion, double x0, const TimeGrid& grid,
                           const NoiseStream& stream, StopRule&& stop_rule,
                           const Refinement& refinement) {
  BrownianTree tree(stream);
  SdePath path;
  path.grid = grid;
  path.times.push_back(grid.t_start);
  path.values.push_back(x0);

  double x = x0;
  std::optional<Terminal> stopped;
  std::size_t step = 0;
  auto refine = [&](double t, double h) {
    return std::abs(drift(t, x)) * h > refinement.threshold;
  };
  auto leaf = [&](double t, double h, const Increment& dw) {
    x = x + drift(t, x) * h + diffusion(t, x) * dw[0];
    const double t1 = t + h;
    if (auto term = stop_rule(t1, x)) {
      stopped = *term;
      if (!std::holds_alternative<BlownUp>(*term)) {
        path.times.push_back(t1);
        path.values.push_back(x);
      }
      return false;
    }
    if (!std::isfinite(x)) {
      throw NumericalError("integrate: non-finite state at step " + std::to_string(step), step);
    }
    path.times.push_back(t1);
    path.values.push_back(x);
    return true;
  };
  for (; step < grid.n_steps; ++step) {
    const double t = grid.time(step);
    const double h = grid.step_length(step);
    if (!walk_step(tree, step, t, h, tree.coarse(step, h), refinement, refine, leaf)) break;
  }
  path.terminal = stopped ? *stopped : Terminal{Alive{x}};
  return path;
}

/// Stop rule that never fires.
struct NoStop {
  std::optional<Terminal> operator()(double, double) const noexcept { return std::nullopt; }
};

}  // namespace carousel::sde
