#include "carousel/sde/time_grid.hpp"

#include <cmath>
#include <string>

#include "carousel/errors.hpp"

namespace carousel::sde {

TimeGrid TimeGrid::make(double t_start, double t_end, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigError("time grid: dt must be positive and finite, got " + std::to_string(dt));
  }
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || !(t_end > t_start)) {
    throw ConfigError("time grid: need t_end > t_start, got [" + std::to_string(t_start) + ", " +
                      std::to_string(t_end) + "]");
  }
  TimeGrid g;
  g.t_start = t_start;
  g.t_end = t_end;
  g.dt = dt;
  const double span = t_end - t_start;
  // A remainder below 1e-9 dt is rounding noise, not a real short step.
  auto n = static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
  if (n == 0) n = 1;
  g.n_steps = n;
  return g;
}

}  // namespace carousel::sde
