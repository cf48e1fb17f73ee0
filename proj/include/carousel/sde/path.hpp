#pragma once

#include <variant>
#include <vector>

#include "carousel/sde/time_grid.hpp"

namespace carousel::sde {

struct Alive {
  double value = 0.0;
};
struct BlownUp {
  double time = 0.0;
};
struct Absorbed {
  double level = 0.0;
  double time = 0.0;
};

using Terminal = std::variant<Alive, BlownUp, Absorbed>;

/// A discretized trajectory. `times` and `values` have one entry per retained point,
/// including sub-steps taken by adaptive refinement; nothing is recorded past a
/// BlownUp or Absorbed event.
struct SdePath {
  TimeGrid grid;
  std::vector<double> times;
  std::vector<double> values;
  Terminal terminal = Alive{};

  bool alive() const noexcept { return std::holds_alternative<Alive>(terminal); }
  bool blown_up() const noexcept { return std::holds_alternative<BlownUp>(terminal); }
  double final_value() const noexcept { return values.empty() ? 0.0 : values.back(); }
};

}  // namespace carousel::sde
