#pragma once

#include <cmath>
#include <cstdint>

namespace carousel::numerics {

namespace detail {

// sin and cos on |r| <= pi/4 by their Taylor series; the truncation error is below
// 5e-17 at the interval ends.
inline void sincos_reduced(double r, double& s, double& c) noexcept {
  const double r2 = r * r;
  s = r * (1.0 + r2 * (-1.0 / 6 + r2 * (1.0 / 120 + r2 * (-1.0 / 5040 + r2 * (1.0 / 362880 +
          r2 * (-1.0 / 39916800 + r2 * (1.0 / 6227020800.0 + r2 * (-1.0 / 1307674368000.0))))))));
  c = 1.0 + r2 * (-0.5 + r2 * (1.0 / 24 + r2 * (-1.0 / 720 + r2 * (1.0 / 40320 + r2 * (-1.0 / 3628800 +
          r2 * (1.0 / 479001600.0 + r2 * (-1.0 / 87178291200.0 + r2 * (1.0 / 20922789888000.0))))))));
}

// Nearest integer (ties to even) for |y| < 2^51 without a libm call.
inline double round_half_even(double y) noexcept {
  constexpr double kShift = 0x1.8p52;
  return (y + kShift) - kShift;
}

}  // namespace detail

/// sin(2 pi u) and cos(2 pi u) for u in [0, 1], accurate to a few ulp of 1. Faster than
/// std::sin/std::cos in throughput-bound loops such as Box-Muller.
inline void sincos_2pi(double u, double& s, double& c) noexcept {
  const double k = detail::round_half_even(4.0 * u);
  const double r = 6.283185307179586477 * (u - 0.25 * k);
  double sr, cr;
  detail::sincos_reduced(r, sr, cr);
  const auto q = static_cast<std::int64_t>(k) & 3;
  // rotate by q quarter turns
  const double s1 = (q & 1) ? cr : sr;
  const double c1 = (q & 1) ? -sr : cr;
  s = (q & 2) ? -s1 : s1;
  c = (q & 2) ? -c1 : c1;
}

}  // namespace carousel::numerics
