#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "carousel/errors.hpp"
#include "carousel/estimate.hpp"
#include "carousel/logtan/logtan.hpp"
#include "carousel/logtan/p1_table.hpp"
#include "carousel/model.hpp"
#include "carousel/numerics/stats.hpp"
#include "carousel/oracles/fredholm.hpp"
#include "carousel/sine/phase.hpp"

using namespace carousel;
using namespace carousel::logtan;

TEST_CASE("drift") {
  const ModelParams p(2.0, 1.0);
  CHECK(logtan_drift(0.0, 0.0, p) == doctest::Approx(0.25));
  const ModelParams z(2.0, 0.0);
  for (double x : {0.3, 1.7, 5.0}) CHECK(logtan_drift(1.0, -x, z) == -logtan_drift(1.0, x, z));
  CHECK(logtan_drift(200.0, 10.0, p) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(std::isinf(logtan_drift(0.0, 800.0, p)));
}

TEST_CASE("warm start") {
  const ModelParams p(2.0, 1.0);
  const double delta = warm_start_delta(p, 0.01);
  CHECK(p.lambda * cumulative_f(delta, p.beta) == doctest::Approx(0.01).epsilon(1e-12));
  const auto ws = warm_start(p, delta);
  // long double evaluation of log tan(0.01 / 4)
  const long double ref = std::log(std::tan(0.0025L));
  CHECK(std::abs(ws.state - static_cast<double>(ref)) < 1e-12);
  CHECK(ws.state == doctest::Approx(-5.991).epsilon(1e-4));
  double prev = warm_start(p, delta).state;
  for (double d = delta / 2; d > 1e-12; d /= 2) {
    const double s = warm_start(p, d).state;
    CHECK(s < prev);
    prev = s;
  }
  CHECK_THROWS_AS(warm_start(p, 1.0), ConfigError);
}

TEST_CASE("doubling the warm-start target leaves p_1(-inf) unchanged") {
  LogtanConfig a, b;
  b.warm_target = 0.005;
  const double h = p1_default_horizon(2.0);
  const auto e1 = estimate_p1(kMinusInfinity, 2.0, 3000, h, 31, a);
  const auto e2 = estimate_p1(kMinusInfinity, 2.0, 3000, h, 32, b);
  CHECK(z_score(e1.value, e1.stderr_, e2.value, e2.stderr_) < 3.0);
}

TEST_CASE("blow-up classification") {
  SUBCASE("large start blows up") {
    const ModelParams p(2.0, 1.0);
    int blown = 0;
    for (std::uint64_t i = 0; i < 200; ++i) blown += simulate_X(24.9, p, 1.0, {1, i, 1}).blown_up();
    CHECK(blown >= 198);
  }
  SUBCASE("lambda = 0 never blows up") {
    const ModelParams p(2.0, 0.0);
    for (std::uint64_t i = 0; i < 1000; ++i) {
      const auto path = simulate_X(0.0, p, 10.0, {2, i, 1});
      REQUIRE(path.alive());
    }
  }
}

TEST_CASE("shared noise keeps X ordered") {
  const ModelParams p(2.0, 3.0);
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto xs = simulate_X_coupled({-2.0, -1.0}, p, 5.0, {3, i, 1});
    const std::size_t n = std::min(xs[0].values.size(), xs[1].values.size());
    CHECK(xs[0].values.size() >= xs[1].values.size());
    for (std::size_t k = 0; k < n; ++k) REQUIRE(xs[0].values[k] <= xs[1].values[k]);
  }
}

TEST_CASE("p_1 estimates") {
  const double h = p1_default_horizon(2.0);
  SUBCASE("far right is zero") {
    const auto e = estimate_p1(10.0, 2.0, 10'000, h, 4);
    CHECK(e.value <= p1_tail_bound(10.0, 2.0) + 1e-12);
    CHECK(e.value == 0.0);
  }
  SUBCASE("entrance boundary equals the gap probability at lambda = 1") {
    const auto e = estimate_p1(kMinusInfinity, 2.0, 6000, h, 5);
    CHECK(std::abs(e.value - oracles::sine_kernel_gap(1.0)) < 3.0 * e.stderr_);
  }
  SUBCASE("nonincreasing in x") {
    const auto a = estimate_p1(-1.0, 2.0, 2000, h, 6);
    const auto b = estimate_p1(0.0, 2.0, 2000, h, 7);
    CHECK(a.value >= b.value - 3.0 * std::hypot(a.stderr_, b.stderr_));
  }
  SUBCASE("blow-up level 25 versus 30") {
    LogtanConfig c30;
    c30.x_max = 30.0;
    const auto a = estimate_p1(0.0, 2.0, 2000, h, 8);
    const auto b = estimate_p1(0.0, 2.0, 2000, h, 8, c30);
    CHECK(std::abs(a.value - b.value) < a.stderr_);
  }
  CHECK_THROWS_AS(estimate_p1(0.0, 2.0, 100, 1.0, 1), ConfigError);
}

TEST_CASE("logtan coordinates match the phase") {
  // X = log tan(alpha / 4) at t = 1 on paths with alpha(1) < 2 pi
  const ModelParams p(2.0, 2.0);
  const std::size_t n = 3000;
  std::vector<double> from_phase, from_x;
  for (std::size_t i = 0; i < n; ++i) {
    sine::PhaseConfig pc;
    const double a = sine::simulate_phase(p, 1.0, {40, i, 1}, pc).path.final_value();
    if (a > 0.0 && a < 2.0 * std::numbers::pi) from_phase.push_back(std::log(std::tan(a / 4.0)));
    const auto x = simulate_X(kMinusInfinity, p, 1.0, {41, i, 1});
    if (x.alive()) from_x.push_back(x.final_value());
  }
  CHECK(numerics::ks_two_sample(from_phase, from_x).p_value > 1e-3);
}

TEST_CASE("p_lambda(-inf) from X equals the direct estimate at lambda = 2") {
  const ModelParams p(2.0, 2.0);
  const double h = sine::required_horizon(p, 1e-4);
  std::vector<double> w;
  for (std::uint64_t i = 0; i < 3000; ++i) {
    const auto x = simulate_X(kMinusInfinity, p, h, {42, i, 1});
    w.push_back(x.alive() ? survival_weight(x.final_value()) : 0.0);
  }
  const auto s = summarize(w);
  const auto d = sine::estimate_gap_direct(p, 0, 3000, 43);
  CHECK(z_score(s.mean, s.stderr_, d.value, d.stderr_) < 3.0);
}

TEST_CASE("survival weight") {
  CHECK(survival_weight(0.0) == doctest::Approx(0.5));
  CHECK(survival_weight(-50.0) == doctest::Approx(1.0));
  CHECK(survival_weight(50.0) == doctest::Approx(0.0));
  // alpha = 4 arctan(e^x), weight = 1 - alpha / (2 pi)
  for (double x : {-2.0, 0.5, 3.0}) {
    CHECK(survival_weight(x) ==
          doctest::Approx(1.0 - 4.0 * std::atan(std::exp(x)) / (2.0 * std::numbers::pi)));
  }
}

namespace {
P1Table synthetic_table() {
  P1Table t;
  t.beta = 2.0;
  t.x_grid = default_p1_grid();
  for (double x : t.x_grid) {
    const double v = 0.84 / (1.0 + std::exp(1.5 * (x - 0.5)));
    t.raw_values.push_back(v);
    t.values.push_back(v);
    t.stderrs.push_back(0.001);
  }
  t.values[10] = t.values[11];  // a flat stretch
  t.finalize();
  return t;
}
}  // namespace

TEST_CASE("P1 table interpolation") {
  const auto t = synthetic_table();
  for (std::size_t k = 0; k < t.x_grid.size(); ++k) CHECK(t(t.x_grid[k]) == t.values[k]);
  for (std::size_t k = 0; k + 1 < t.x_grid.size(); ++k) {
    for (double f : {0.1, 0.37, 0.5, 0.9}) {
      const double x = t.x_grid[k] + f * (t.x_grid[k + 1] - t.x_grid[k]);
      CHECK(t(x) <= t.values[k] + 1e-15);
      CHECK(t(x) >= t.values[k + 1] - 1e-15);
    }
  }
  CHECK(t(8.0) <= t.values.back());
  CHECK(t(-20.0) == t.values.front());
  CHECK(t(40.0) >= 0.0);
  CHECK_THROWS_AS(t(NAN), NumericalError);
  CHECK_THROWS_AS(t.require_beta(1.0), ConfigError);

  const auto u = P1Table::from_json(t.to_json());
  CHECK(u.to_json() == t.to_json());
  for (double x : {-3.3, 0.1, 4.4}) CHECK(u(x) == t(x));
  CHECK_THROWS_AS(P1Table::from_json("{}"), ConfigError);
}

TEST_CASE("P1 table build") {
  LogtanConfig c;
  const auto t = build_p1_table(default_p1_grid(), 2.0, 60, p1_default_horizon(2.0), 9, c);
  REQUIRE(t.values.size() == 29);
  for (std::size_t k = 0; k < t.values.size(); ++k) {
    CHECK(t.values[k] >= 0.0);
    CHECK(t.values[k] <= 1.0);
    if (k > 0) CHECK(t.values[k] <= t.values[k - 1]);
    if (t.x_grid[k] > 4.0) CHECK(t.raw_values[k] <= p1_tail_bound(t.x_grid[k], 2.0) + 3.0 * t.stderrs[k]);
  }
  CHECK_THROWS_AS(build_p1_table({-1.0, 0.0, 1.0}, 2.0, 10, 10.0, 1), ConfigError);
}
