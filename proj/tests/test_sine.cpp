#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "carousel/errors.hpp"
#include "carousel/estimate.hpp"
#include "carousel/model.hpp"
#include "carousel/numerics/quadrature.hpp"
#include "carousel/numerics/stats.hpp"
#include "carousel/oracles/fredholm.hpp"
#include "carousel/sine/phase.hpp"

using namespace carousel;
using namespace carousel::sine;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

TEST_CASE("speed function") {
  CHECK(speed_f(0.0, 2.0) == 0.5);
  for (double beta : {1.0, 2.0, 4.0}) {
    CHECK(speed_f(4.0 / beta * std::log(2.0), beta) == doctest::Approx(beta / 8).epsilon(1e-14));
    const double total =
        numerics::adaptive_simpson([beta](double t) { return speed_f(t, beta); }, 0.0, 400.0 / beta);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(cumulative_f(3.0, beta) ==
          doctest::Approx(numerics::adaptive_simpson([beta](double t) { return speed_f(t, beta); },
                                                     0.0, 3.0)));
  }
}

TEST_CASE("model parameters") {
  CHECK(ModelParams(1.0, 2.0).gamma_beta() == doctest::Approx(-0.125));
  CHECK(ModelParams(2.0, 2.0).gamma_beta() == doctest::Approx(-0.25));
  CHECK(ModelParams(4.0, 2.0).gamma_beta() == doctest::Approx(-0.125));
  CHECK(ModelParams(2.0, 1.0).T() == 0.0);
  CHECK(ModelParams(2.0, 3.0).T() < ModelParams(2.0, 3.5).T());
  CHECK_THROWS_AS(ModelParams(0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(ModelParams(2.0, -1.0), ConfigError);
  CHECK_THROWS_AS(ModelParams(2.0, 0.5).T(), DomainError);
}

TEST_CASE("horizon and residual drift") {
  const ModelParams p(2.0, 3.0);
  const double h = required_horizon(p, 1e-4);
  CHECK(p.lambda * std::exp(-p.beta * h / 4) == doctest::Approx(1e-4));
  CHECK(residual_drift_bound(p, 1.7) == doctest::Approx(3.0 * std::exp(-0.85)).epsilon(1e-14));
  CHECK(default_phase_dt(2.0) == 1e-3);
  CHECK(default_phase_dt(400.0) == doctest::Approx(2.5e-4));
}

TEST_CASE("zero lambda gives the zero path") {
  const ModelParams p(2.0, 0.0);
  const auto ph = simulate_phase(p, 2.0, {1, 0, 1});
  for (double a : ph.path.values) CHECK(a == 0.0);
  CHECK(ph.path.values.front() == 0.0);
}

TEST_CASE("terminal weights") {
  CHECK(terminal_weight_k(kTwoPi, 1) == 1.0);
  CHECK(terminal_weight_k(kTwoPi, 0) == 0.0);
  CHECK(terminal_weight_k(kTwoPi, 2) == 0.0);
  CHECK(terminal_weight_k(std::numbers::pi, 0) == doctest::Approx(0.5));
  CHECK(terminal_weight_k(std::numbers::pi, 1) == doctest::Approx(0.5));
  for (double a : {0.1, 2.0, 7.7, 13.0, 20.5}) {
    double s = 0.0;
    for (int k = 0; k < 6; ++k) s += terminal_weight_k(a, k);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(terminal_weight_k(1.0, -1), DomainError);
  // a path stopped too early is rejected
  const ModelParams p(2.0, 2.0);
  const auto ph = simulate_phase(p, 1.0, {1, 0, 1});
  CHECK_THROWS_AS(terminal_weight_k(ph, 0), ConfigError);
}

TEST_CASE("mean winding equals lambda / 2pi") {
  // E alpha(horizon) = lambda F(horizon): the noise term is a martingale
  const ModelParams p(2.0, 1.0);
  const std::size_t n = 20'000;
  const auto a = simulate_terminal_phases(p, n, 5);
  std::vector<double> c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] / kTwoPi;
  const auto s = summarize(c);
  CHECK(std::abs(s.mean - 1.0 / kTwoPi) < 3.0 * s.stderr_);
}

TEST_CASE("halving dt moves terminal phases by O(sqrt dt)") {
  const ModelParams p(2.0, 1.0);
  const double horizon = 5.0;
  double d01 = 0.0, d12 = 0.0;
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    double a[3];
    for (int lev = 0; lev < 3; ++lev) {
      PhaseConfig c;
      c.dt = 0.01;
      c.refine_levels = lev;
      a[lev] = simulate_phase(p, horizon, {9, static_cast<std::uint64_t>(i), 1}, c).path.final_value();
    }
    d01 += (a[0] - a[1]) * (a[0] - a[1]);
    d12 += (a[1] - a[2]) * (a[1] - a[2]);
  }
  d01 = std::sqrt(d01 / n);
  d12 = std::sqrt(d12 / n);
  CHECK(d01 < std::sqrt(0.01));
  CHECK(d01 / d12 > 1.2);
}

TEST_CASE("direct estimator") {
  SUBCASE("small lambda: Markov bound on the count") {
    const ModelParams p(2.0, 0.1);
    const auto e = estimate_gap_direct(p, 0, 5000, 3);
    CHECK(e.value >= 1.0 - 0.1 / kTwoPi - 3.0 * e.stderr_);
    CHECK(e.method == Method::direct);
  }
  SUBCASE("beta = 2, lambda = 2 against the Fredholm determinant") {
    const ModelParams p(2.0, 2.0);
    const auto e = estimate_gap_direct(p, 0, 20'000, 4);
    CHECK(std::abs(e.value - oracles::sine_kernel_gap(2.0)) < 3.0 * e.stderr_);
    const auto e2 = estimate_gap_direct(p, 0, 5000, 5);
    const auto e3 = estimate_gap_direct(p, 0, 5000, 6);
    CHECK(z_score(e2.value, e2.stderr_, e3.value, e3.stderr_) < 4.0);
  }
  SUBCASE("count identity and probabilities") {
    const ModelParams p(1.0, 3.0);
    const auto d = estimate_gap_direct_all(p, 12, 5000, 7);
    double total = 0.0, mean = 0.0;
    for (std::size_t k = 0; k < d.by_k.size(); ++k) {
      total += d.by_k[k].value;
      mean += static_cast<double>(k) * d.by_k[k].value;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mean == doctest::Approx(d.mean_count).epsilon(1e-9));
    CHECK(std::abs(d.mean_count - 3.0 / kTwoPi) < 3.0 * d.mean_count_stderr);
    CHECK(d.bias_bound <= 1e-4 / kTwoPi * (1 + 1e-12));
  }
  SUBCASE("grid refinement") {
    const ModelParams p(2.0, 3.0);
    PhaseConfig c0, c1;
    c0.dt = 2e-3;
    c1.dt = 2e-3;
    c1.refine_levels = 1;
    const auto a = estimate_gap_direct(p, 0, 4000, 8, c0);
    const auto b = estimate_gap_direct(p, 0, 4000, 8, c1);
    CHECK(std::abs(a.value - b.value) < 3.0 * std::hypot(a.stderr_, b.stderr_) + 2e-3);
  }
  CHECK_THROWS_AS(estimate_gap_direct(ModelParams(2.0, 2.0), -1, 10, 1), DomainError);
}

TEST_CASE("phase family") {
  SUBCASE("single-lambda marginal matches the scalar phase") {
    const ModelParams p(4.0, 1.0);
    const double horizon = required_horizon(p, 1e-4);
    const std::size_t n = 10'000;
    std::vector<double> fam(n);
    for (std::size_t i = 0; i < n; ++i) fam[i] = phase_family_terminal({1.0}, 4.0, horizon, {12, i, 2})[0];
    PhaseConfig c;
    c.threads = 1;
    const auto single = simulate_terminal_phases(p, n, 13, c);
    CHECK(numerics::ks_two_sample(fam, single).p_value > 1e-3);
  }
  SUBCASE("counts are monotone in lambda") {
    const std::vector<double> grid = {1.0, 2.0, 4.0};
    double m1 = 0.0, m2 = 0.0;
    for (std::uint64_t i = 0; i < 500; ++i) {
      const auto a = phase_family_terminal(grid, 2.0, 25.0, {14, i, 2});
      CHECK(a[0] <= a[1] + 1e-9);
      CHECK(a[1] <= a[2] + 1e-9);
      m1 += std::floor(a[0] / kTwoPi + 0.5);
      m2 += std::floor(a[2] / kTwoPi + 0.5);
    }
    CHECK(m2 >= m1);
  }
  SUBCASE("zero lambda") {
    const auto f = simulate_phase_family({0.0}, 2.0, 1.0, {1, 0, 2});
    REQUIRE(f.size() == 1);
    for (double a : f[0].path.values) CHECK(a == 0.0);
  }
  CHECK_THROWS_AS(simulate_phase_family({1.0}, 2.0, 1.0, {1, 0, 1}), ConfigError);
}

TEST_CASE("sampling Sine_beta points") {
  SUBCASE("tiny window is almost surely empty") {
    int empty = 0;
    const int n = 200;
    for (int s = 0; s < n; ++s) empty += sample_sine_beta(0.01, 2.0, 10, s).points.empty() ? 1 : 0;
    CHECK(empty >= 0.99 * n - 3.0 * std::sqrt(0.01 * n));
  }
  SUBCASE("one point per 2 pi on average") {
    std::vector<double> counts;
    for (int s = 0; s < 200; ++s) {
      const auto c = sample_sine_beta(kTwoPi, 2.0, 20, 1000 + s);
      counts.push_back(static_cast<double>(c.points.size()));
      for (std::size_t i = 1; i < c.counts.size(); ++i) CHECK(c.counts[i - 1] <= c.counts[i]);
      for (double x : c.points) {
        CHECK(x >= 0.0);
        CHECK(x <= kTwoPi);
      }
    }
    const auto s = summarize(counts);
    CHECK(std::abs(s.mean - 1.0) < 3.0 * s.stderr_);
  }
}

TEST_CASE("driftless phase") {
  const auto p = simulate_driftless_phase(std::numbers::pi, 5.0, {1, 2, 1});
  CHECK(p.values.front() == std::numbers::pi);
  for (double a : p.values) {
    CHECK(a >= 0.0);
    CHECK(a <= kTwoPi);
  }
}
