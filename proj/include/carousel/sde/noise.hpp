#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "carousel/sde/philox.hpp"
#include "carousel/sde/time_grid.hpp"

namespace carousel::sde {

/// Identifies one reproducible Brownian path: the same (seed, stream_id, dimension)
/// always yields the same increments, whatever thread evaluates it.
struct NoiseStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  int dimension = 1;
};

using Increment = std::array<double, 2>;

/// Counter-based Brownian path with dyadic refinement.
///
/// Coarse increments of step i come from normal index i*dimension + component. A
/// coarse (or already refined) interval can be split at its midpoint by an exact
/// Brownian-bridge draw keyed on (step, node), with node numbering 1 for the coarse
/// interval and 2k, 2k+1 for the halves of node k. Callers refining the same interval
/// to different depths therefore see one consistent Brownian path.
class BrownianTree {
 public:
  explicit BrownianTree(const NoiseStream& stream);

  int dimension() const noexcept { return dim_; }

  /// Increment over coarse step `step` of length h.
  Increment coarse(std::size_t step, double h);

  /// Left-half increment of node `node` (length h, total increment w) of coarse step `step`.
  Increment left_half(std::size_t step, std::uint64_t node, const Increment& w, double h) const;

 private:
  Philox4x64::Key key_;
  int dim_;
  std::uint64_t cached_block_ = ~std::uint64_t{0};
  std::array<double, 4> cache_{};
  double sqrt_h_arg_ = -1.0;
  double sqrt_h_ = 0.0;
};

/// Increments of `stream` over every step of `grid`. Throws ConfigError for a
/// dimension outside {1, 2}.
std::vector<Increment> brownian_increments(const NoiseStream& stream, const TimeGrid& grid);

}  // namespace carousel::sde
