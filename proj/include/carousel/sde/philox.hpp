#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "carousel/numerics/fast_trig.hpp"

namespace carousel::sde {

/// Philox4x64-10 counter-based block cipher (Salmon et al., SC'11).
///
/// Output is a pure function of (counter, key); matches numpy.random.Philox.
class Philox4x64 {
 public:
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static constexpr Counter apply(Counter c, Key k) noexcept {
    for (int r = 0; r < 10; ++r) {
      c = round(c, k);
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    return c;
  }

 private:
  static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
  static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

  static constexpr Counter round(const Counter& c, const Key& k) noexcept {
    const unsigned __int128 p0 = static_cast<unsigned __int128>(kMul0) * c[0];
    const unsigned __int128 p1 = static_cast<unsigned __int128>(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
    const auto lo0 = static_cast<std::uint64_t>(p0);
    const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
    const auto lo1 = static_cast<std::uint64_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// Maps 64 random bits to a double in the open interval (0, 1).
inline double to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Four standard normals from one Philox block via two Box-Muller pairs.
inline std::array<double, 4> normals_from_block(const Philox4x64::Counter& block) noexcept {
  std::array<double, 4> z{};
  for (int p = 0; p < 2; ++p) {
    const double u1 = to_open_unit(block[2 * p]);
    const double u2 = to_open_unit(block[2 * p + 1]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    double s = 0.0;
    double c = 0.0;
    numerics::sincos_2pi(u2, s, c);
    z[2 * p] = r * c;
    z[2 * p + 1] = r * s;
  }
  return z;
}

/// Sequential generator over one (seed, stream) key: successive blocks use counters
/// {domain, 0, 0, n} for n = 0, 1, ... so distinct domains never overlap.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t domain = 0) noexcept
      : key_{seed, stream}, domain_(domain) {}

  std::uint64_t next_u64() noexcept {
    if (bits_pos_ == 4) {
      bits_ = Philox4x64::apply({domain_, 0, 0, bits_block_++}, key_);
      bits_pos_ = 0;
    }
    return bits_[bits_pos_++];
  }

  double uniform() noexcept { return to_open_unit(next_u64()); }

  double normal() noexcept {
    if (normal_pos_ == 4) {
      normals_ = normals_from_block(Philox4x64::apply({domain_, 1, 0, normal_block_++}, key_));
      normal_pos_ = 0;
    }
    return normals_[normal_pos_++];
  }

  /// Gamma(shape, 1) variate by Marsaglia-Tsang; shape < 1 uses the u^{1/shape} boost.
  double gamma(double shape) noexcept {
    if (shape < 1.0) {
      const double g = gamma(shape + 1.0);
      return g * std::pow(uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = 0.0;
      double v = 0.0;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
    }
  }

  /// Chi-distributed variate with `dof` degrees of freedom.
  double chi(double dof) noexcept { return std::sqrt(2.0 * gamma(0.5 * dof)); }

 private:
  Philox4x64::Key key_;
  std::uint64_t domain_;
  Philox4x64::Counter bits_{};
  std::uint64_t bits_block_ = 0;
  int bits_pos_ = 4;
  std::array<double, 4> normals_{};
  std::uint64_t normal_block_ = 0;
  int normal_pos_ = 4;
};

}  // namespace carousel::sde
