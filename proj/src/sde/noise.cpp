#include "carousel/sde/noise.hpp"

#include <cmath>

#include "carousel/errors.hpp"

namespace carousel::sde {

namespace {
// Tags in the last counter word keep tree draws disjoint from CounterRng sequences.
constexpr std::uint64_t kTagCoarse = 0xFFFFFFFFFFFFFF01ULL;
constexpr std::uint64_t kTagSplit = 0xFFFFFFFFFFFFFF02ULL;
}  // namespace

BrownianTree::BrownianTree(const NoiseStream& stream)
    : key_{stream.seed, stream.stream_id}, dim_(stream.dimension) {
  if (dim_ != 1 && dim_ != 2) {
    throw ConfigError("noise stream dimension must be 1 or 2, got " + std::to_string(dim_));
  }
}

Increment BrownianTree::coarse(std::size_t step, double h) {
  Increment w{0.0, 0.0};
  if (h != sqrt_h_arg_) {
    sqrt_h_arg_ = h;
    sqrt_h_ = std::sqrt(h);
  }
  const double scale = sqrt_h_;
  for (int c = 0; c < dim_; ++c) {
    const std::uint64_t k = static_cast<std::uint64_t>(step) * static_cast<std::uint64_t>(dim_) +
                            static_cast<std::uint64_t>(c);
    const std::uint64_t block = k >> 2;
    if (block != cached_block_) {
      cache_ = normals_from_block(Philox4x64::apply({block, 0, 0, kTagCoarse}, key_));
      cached_block_ = block;
    }
    w[c] = scale * cache_[k & 3];
  }
  return w;
}

Increment BrownianTree::left_half(std::size_t step, std::uint64_t node, const Increment& w,
                                  double h) const {
  const auto z = normals_from_block(
      Philox4x64::apply({static_cast<std::uint64_t>(step), node, 0, kTagSplit}, key_));
  const double sd = 0.5 * std::sqrt(h);
  Increment left{0.0, 0.0};
  for (int c = 0; c < dim_; ++c) left[c] = 0.5 * w[c] + sd * z[c];
  return left;
}

std::vector<Increment> brownian_increments(const NoiseStream& stream, const TimeGrid& grid) {
  if (!(grid.dt > 0.0)) throw ConfigError("brownian_increments: grid dt must be positive");
  BrownianTree tree(stream);
  std::vector<Increment> out(grid.n_steps);
  for (std::size_t i = 0; i < grid.n_steps; ++i) out[i] = tree.coarse(i, grid.step_length(i));
  return out;
}

}  // namespace carousel::sde
