#pragma once

#include <cstddef>

namespace carousel::sde {

/// Uniform time grid on [t_start, t_end] with step dt. When the span is not an integer
/// multiple of dt, the final step is shortened; every interior step has length dt.
struct TimeGrid {
  double t_start = 0.0;
  double t_end = 0.0;
  double dt = 0.0;
  std::size_t n_steps = 0;

  /// Throws ConfigError unless dt > 0 and t_end > t_start.
  static TimeGrid make(double t_start, double t_end, double dt);

  /// Grid point i for i in [0, n_steps]; point n_steps is t_end.
  double time(std::size_t i) const noexcept {
    return i >= n_steps ? t_end : t_start + static_cast<double>(i) * dt;
  }

  double step_length(std::size_t i) const noexcept { return time(i + 1) - time(i); }
};

}  // namespace carousel::sde
