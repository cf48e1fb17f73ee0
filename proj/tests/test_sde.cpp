#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "carousel/errors.hpp"
#include "carousel/numerics/fast_trig.hpp"
#include "carousel/sde/integrate.hpp"
#include "carousel/sde/noise.hpp"
#include "carousel/sde/philox.hpp"
#include "carousel/sde/time_grid.hpp"

using namespace carousel;
using namespace carousel::sde;

TEST_CASE("philox known answer") {
  // reference output of the Random123 / numpy Philox4x64-10 implementation
  const auto out = Philox4x64::apply({6, 6, 7, 8}, {0x1234, 0xabcd});
  CHECK(out[0] == 0x60b30bc06164acf1ULL);
  CHECK(out[1] == 0x07b56a1a0f4f2888ULL);
  CHECK(out[2] == 0xedd840e2c7496dcfULL);
  CHECK(out[3] == 0x40c260d2045aac41ULL);
}

TEST_CASE("sincos_2pi matches libm") {
  double worst = 0.0;
  for (int i = 0; i <= 200000; ++i) {
    const double u = i / 200000.0;
    double s, c;
    numerics::sincos_2pi(u, s, c);
    worst = std::max(worst, std::abs(s - std::sin(2.0 * std::numbers::pi * u)));
    worst = std::max(worst, std::abs(c - std::cos(2.0 * std::numbers::pi * u)));
  }
  CHECK(worst < 2e-15);
}

TEST_CASE("time grid") {
  const auto g = TimeGrid::make(0.0, 1.0, 0.3);
  CHECK(g.n_steps == 4);
  CHECK(g.time(3) == doctest::Approx(0.9));
  CHECK(g.time(4) == 1.0);
  CHECK(g.step_length(3) == doctest::Approx(0.1));
  CHECK(g.step_length(1) == doctest::Approx(0.3));
  const auto exact = TimeGrid::make(0.0, 1.0, 0.25);
  CHECK(exact.n_steps == 4);
  CHECK(exact.time(2) == 0.5);
  CHECK_THROWS_AS(TimeGrid::make(0.0, 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(TimeGrid::make(1.0, 1.0, 0.1), ConfigError);
}

TEST_CASE("increments are deterministic") {
  const auto g = TimeGrid::make(0.0, 0.4, 0.1);
  const NoiseStream s{7, 0, 1};
  const auto a = brownian_increments(s, g);
  const auto b = brownian_increments(s, g);
  REQUIRE(a.size() == 4);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i][0] == b[i][0]);
  CHECK_THROWS_AS(brownian_increments({7, 0, 3}, g), ConfigError);
}

TEST_CASE("increment variance") {
  // sample variance of 1e6 normals has relative sd sqrt(2/n) = 1.4e-3
  const auto g = TimeGrid::make(0.0, 1e4, 0.01);
  const auto w = brownian_increments({7, 0, 1}, g);
  REQUIRE(w.size() == 1'000'000);
  double s = 0.0, s2 = 0.0;
  for (const auto& x : w) {
    s += x[0];
    s2 += x[0] * x[0];
  }
  const double n = static_cast<double>(w.size());
  const double var = s2 / n - (s / n) * (s / n);
  CHECK(std::abs(var / 0.01 - 1.0) < 0.01);
  CHECK(std::abs(s / n) < 4.0 * std::sqrt(0.01 / n));
}

TEST_CASE("streams are uncorrelated") {
  const auto g = TimeGrid::make(0.0, 1e3, 0.01);
  const auto a = brownian_increments({7, 0, 1}, g);
  const auto b = brownian_increments({7, 1, 1}, g);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += a[i][0] * b[i][0];
    saa += a[i][0] * a[i][0];
    sbb += b[i][0] * b[i][0];
  }
  CHECK(std::abs(sab / std::sqrt(saa * sbb)) < 0.01);

  // the two components of a 2-d stream
  const auto c = brownian_increments({7, 0, 2}, g);
  double s01 = 0.0, s00 = 0.0, s11 = 0.0;
  for (const auto& x : c) {
    s01 += x[0] * x[1];
    s00 += x[0] * x[0];
    s11 += x[1] * x[1];
  }
  CHECK(std::abs(s01 / std::sqrt(s00 * s11)) < 0.01);
}

TEST_CASE("brownian bridge splits") {
  BrownianTree tree({3, 5, 1});
  const double h = 0.02;
  double sl = 0.0, sl2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const auto w = tree.coarse(static_cast<std::size_t>(i), h);
    const auto left = tree.left_half(static_cast<std::size_t>(i), 1, w, h);
    // left half given the total: mean w/2, variance h/4
    const double r = left[0] - 0.5 * w[0];
    sl += r;
    sl2 += r * r;
  }
  CHECK(std::abs(sl / n) < 4.0 * std::sqrt(h / 4 / n));
  CHECK(std::abs(sl2 / n / (h / 4) - 1.0) < 0.02);
  // same node, same draw
  const auto w = tree.coarse(10, h);
  CHECK(tree.left_half(10, 3, w, h)[0] == tree.left_half(10, 3, w, h)[0]);
}

TEST_CASE("euler step") {
  CHECK(euler_step(0.0, 1.0, 0.0, 123.0, 0.5) == 0.5);
  CHECK(euler_step(2.0, 0.0, 1.0, 0.3, 0.1) == doctest::Approx(2.3));
  CHECK(euler_step(1.0, -1.0, 2.0, -0.2, 0.25) == doctest::Approx(0.35));
  CHECK_THROWS_AS(euler_step(NAN, 0.0, 1.0, 0.1, 0.1), NumericalError);
  CHECK_THROWS_AS(euler_step(0.0, 0.0, 1.0, 0.1, 0.0), ConfigError);
}

TEST_CASE("integrate: constant path") {
  const auto g = TimeGrid::make(0.0, 1.0, 0.1);
  const auto p = integrate([](double, double) { return 0.0; }, [](double, double) { return 0.0; },
                           3.0, g, {1, 0, 1}, NoStop{});
  CHECK(p.alive());
  CHECK(p.values.size() == 11);
  for (double v : p.values) CHECK(v == 3.0);
  CHECK(std::get<Alive>(p.terminal).value == 3.0);
}

TEST_CASE("integrate: deterministic ramp blows up on time") {
  const auto g = TimeGrid::make(0.0, 1.0, 1e-3);
  auto stop = [](double t, double x) -> std::optional<Terminal> {
    if (x >= 10.0) return Terminal{BlownUp{t}};
    return std::nullopt;
  };
  const auto p = integrate([](double, double) { return 100.0; }, [](double, double) { return 0.0; },
                           0.0, g, {1, 0, 1}, stop);
  REQUIRE(p.blown_up());
  CHECK(std::abs(std::get<BlownUp>(p.terminal).time - 0.1) <= 1e-3 + 1e-12);
  CHECK(p.times.back() < std::get<BlownUp>(p.terminal).time);
}

TEST_CASE("integrate: Ornstein-Uhlenbeck stationary variance") {
  // dX = -X dt + dW has stationary variance 1/2; sample one long path after burn-in
  const auto g = TimeGrid::make(0.0, 20'000.0, 0.01);
  const auto p = integrate([](double, double x) { return -x; }, [](double, double) { return 1.0; },
                           0.0, g, {11, 0, 1}, NoStop{});
  double s = 0.0, s2 = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 1000; i < p.values.size(); ++i) {
    s += p.values[i];
    s2 += p.values[i] * p.values[i];
    ++n;
  }
  const double var = s2 / n - (s / n) * (s / n);
  CHECK(std::abs(var / 0.5 - 1.0) < 0.05);
}

TEST_CASE("integrate: strong convergence on OU against a fine reference") {
  // Euler at dt and dt/2 against a 2^8-times finer solution on the same Brownian path
  const double T = 1.0;
  const double dt = 0.02;
  auto drift = [](double, double x) { return -x; };
  auto diff = [](double, double x) { return 0.5 + 0.3 * std::sin(x); };
  const auto g = TimeGrid::make(0.0, T, dt);
  double e1 = 0.0, e2 = 0.0;
  const int paths = 400;
  for (int i = 0; i < paths; ++i) {
    const NoiseStream s{21, static_cast<std::uint64_t>(i), 1};
    const double ref =
        integrate(drift, diff, 1.0, g, s, NoStop{}, Refinement{0.25, 8, 8}).final_value();
    const double a = integrate(drift, diff, 1.0, g, s, NoStop{}).final_value();
    const double b =
        integrate(drift, diff, 1.0, g, s, NoStop{}, Refinement{0.25, 1, 1}).final_value();
    e1 += (a - ref) * (a - ref);
    e2 += (b - ref) * (b - ref);
  }
  e1 = std::sqrt(e1 / paths);
  e2 = std::sqrt(e2 / paths);
  CHECK(e1 < std::sqrt(dt));
  CHECK(e1 / e2 > 1.3);
}
