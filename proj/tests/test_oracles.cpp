#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "carousel/errors.hpp"
#include "carousel/estimate.hpp"
#include "carousel/numerics/quadrature.hpp"
#include "carousel/numerics/stats.hpp"
#include "carousel/oracles/btw.hpp"
#include "carousel/oracles/fredholm.hpp"
#include "carousel/oracles/kappa.hpp"
#include "carousel/oracles/tridiagonal.hpp"

using namespace carousel;
using namespace carousel::oracles;
constexpr double kPi = std::numbers::pi;

TEST_CASE("n = 2 gap law") {
  // joint density of (l1, l2) proportional to |l1 - l2|^2 exp(-(l1^2 + l2^2)/2) at beta = 2
  auto joint = [](double a, double b) { return (a - b) * (a - b) * std::exp(-0.5 * (a * a + b * b)); };
  // Gauss-Legendre product rule over a in [-9, 9] and b in [a - d, a + d]
  const auto gl = numerics::gauss_legendre(160);
  auto mass_within = [&](double d) {
    double m = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double a = 9.0 * gl.nodes[i];
      double inner = 0.0;
      for (std::size_t j = 0; j < gl.nodes.size(); ++j) inner += gl.weights[j] * joint(a, a + d * gl.nodes[j]);
      m += 9.0 * gl.weights[i] * d * inner;
    }
    return m;
  };
  const double total = mass_within(20.0);
  std::vector<double> grid, cdf;
  for (double d = 0.0; d <= 10.0; d += 0.05) {
    grid.push_back(d);
    cdf.push_back(d == 0.0 ? 0.0 : mass_within(d) / total);
  }
  auto F = [&](double d) {
    if (d >= grid.back()) return 1.0;
    const auto k = static_cast<std::size_t>(d / 0.05);
    const double s = (d - grid[k]) / 0.05;
    return (1 - s) * cdf[k] + s * cdf[k + 1];
  };
  std::vector<double> gaps;
  for (std::uint64_t i = 0; i < 3000; ++i) {
    const auto s = sample_tridiagonal_beta(2, 2.0, 5, i);
    REQUIRE(s.eigenvalues.size() == 2);
    gaps.push_back(s.eigenvalues[1] - s.eigenvalues[0]);
  }
  CHECK(numerics::ks_one_sample(gaps, F).p_value > 1e-3);
}

TEST_CASE("tridiagonal solver invariants") {
  sde::CounterRng rng(6, 0);
  for (double beta : {1.0, 2.0, 4.0}) {
    const auto m = tridiagonal_beta_matrix(300, beta, rng);
    const auto ev = tridiagonal_eigenvalues(m);
    REQUIRE(ev.size() == 300);
    CHECK(std::is_sorted(ev.begin(), ev.end()));
    double tr = 0.0, sum = 0.0, scale = 0.0;
    for (double d : m.diag) tr += d;
    for (double e : ev) {
      sum += e;
      scale += std::abs(e);
    }
    CHECK(std::abs(sum - tr) <= 1e-8 * scale);
    const auto below = static_cast<std::size_t>(std::count_if(ev.begin(), ev.end(), [](double e) { return e < 0.0; }));
    CHECK(below == sturm_count(m, 0.0));
    const auto [lo, hi] = gershgorin(m);
    CHECK(lo <= ev.front());
    CHECK(hi >= ev.back());
    const auto inside = eigenvalues_in(m, -1.0, 1.0);
    CHECK(inside.size() == sturm_count(m, 1.0) - sturm_count(m, -1.0));
  }
  CHECK_THROWS_AS(sample_tridiagonal_beta(1, 2.0, 1), ConfigError);
  CHECK_THROWS_AS(sample_tridiagonal_beta(kMaxTridiagonalN + 1, 2.0, 1), ConfigError);
}

TEST_CASE("semicircle") {
  auto F = [](double x) {
    if (x <= -2) return 0.0;
    if (x >= 2) return 1.0;
    return 0.5 + x * std::sqrt(4 - x * x) / (4 * kPi) + std::asin(x / 2) / kPi;
  };
  const std::size_t n = 1000;
  double d = 0.0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    auto s = sample_tridiagonal_beta(n, 2.0, 7, i);
    for (double& e : s.eigenvalues) e /= std::sqrt(static_cast<double>(n));
    d += numerics::ks_one_sample(s.eigenvalues, F).statistic;
  }
  CHECK(d / 50 < 0.05);
}

TEST_CASE("bulk rescaling") {
  const std::size_t n = 400;
  SUBCASE("one point per 2 pi") {
    const auto w = bulk_window_samples(n, 2.0, 0.0, 2 * kPi, 1000, 8);
    std::vector<double> c;
    for (const auto& s : w) c.push_back(static_cast<double>(s.size()));
    const auto s = summarize(c);
    CHECK(std::abs(s.mean - 1.0) < 3 * s.stderr_);
  }
  SUBCASE("rescaling and sorting commute") {
    const auto s = sample_tridiagonal_beta(n, 2.0, 9);
    const auto r = bulk_rescale(s, 1.5);
    CHECK(std::is_sorted(r.begin(), r.end()));
    CHECK(r[10] == doctest::Approx(std::sqrt(4.0 * n - 2.25) * (s.eigenvalues[10] - 1.5)));
  }
  SUBCASE("window edge") {
    const auto s = sample_tridiagonal_beta(n, 2.0, 9);
    const double edge = 2 * std::sqrt(double(n)) * (1 - std::pow(double(n), -1.0 / 3));
    CHECK_THROWS_AS(bulk_rescale(s, edge), DomainError);
    CHECK_THROWS_AS(bulk_rescale(s, -edge - 1), DomainError);
    CHECK_NOTHROW(bulk_rescale(s, 0.9 * edge));
  }
  SUBCASE("count variance over 20 pi is strongly sub-Poisson") {
    const double L = 20 * kPi;
    const auto w = bulk_window_samples(n, 2.0, 0.0, L, 500, 10);
    std::vector<double> c;
    for (const auto& s : w) c.push_back(static_cast<double>(s.size()));
    const auto s = summarize(c);
    const double var = s.stderr_ * s.stderr_ * c.size();
    MESSAGE("count mean " << s.mean << ", variance " << var);
    CHECK(var < L / (2 * kPi) * 0.5);
  }
}

TEST_CASE("empirical gap probability") {
  const auto w = bulk_window_samples(400, 2.0, 0.0, 6.0, 1000, 11);
  CHECK(empirical_gap_prob(w, 0.0, 0).value == 1.0);
  CHECK(empirical_gap_prob(w, 0.0, 1).value == 0.0);
  const auto e = empirical_gap_prob(w, 2.0, 0);
  CHECK(e.method == Method::oracle_matrix);
  CHECK(std::abs(e.value - sine_kernel_gap(2.0)) < 3 * e.stderr_ + 0.01);
  double total = 0.0;
  for (int k = 0; k <= 10; ++k) total += empirical_gap_prob(w, 6.0, k).value;
  CHECK(total >= 0.999);
  const std::vector<std::vector<double>> few(50);
  CHECK_THROWS_AS(empirical_gap_prob(few, 1.0, 0), ConfigError);
}

TEST_CASE("Fredholm determinant") {
  CHECK(sine_kernel_gap(0.0) == 1.0);
  CHECK(std::abs(sine_kernel_gap(0.01) - (1 - 0.01 / (2 * kPi))) < 1e-5);
  const double a = sine_kernel_det(6.0, 40), b = sine_kernel_det(6.0, 80);
  CHECK(std::abs(a / b - 1) < 1e-10);
  std::vector<double> v;
  for (double l = 0.0; l <= 12.0; l += 0.5) v.push_back(sine_kernel_gap(l));
  for (std::size_t k = 1; k < v.size(); ++k) CHECK(v[k] <= v[k - 1]);
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    CHECK(2 * std::log(v[k]) >= std::log(v[k - 1]) + std::log(v[k + 1]) - 1e-12);
  }
  const auto p = sine_kernel_count_probs(6.0, 8);
  double s = 0.0, mean = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    s += p[k];
    mean += static_cast<double>(k) * p[k];
  }
  CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(mean == doctest::Approx(6.0 / (2 * kPi)).epsilon(1e-6));
  CHECK(p[0] == doctest::Approx(sine_kernel_gap(6.0)).epsilon(1e-9));
  CHECK_THROWS_AS(sine_kernel_gap(1.0, 1), DomainError);
  CHECK_THROWS_AS(sine_kernel_gap(-1.0), ConfigError);
}

namespace {
// zeta'(-1) = 1/12 - log A with log A = (gamma + log 2 pi - 6 zeta'(2) / pi^2) / 12 and
// zeta'(2) = -sum log k / k^2, the tail by Euler-Maclaurin.
double zeta_prime_minus_one_oracle() {
  const int N = 200;
  long double s = 0.0L;
  for (int k = 2; k < N; ++k) s += std::log(static_cast<long double>(k)) / (static_cast<long double>(k) * k);
  const long double x = N, lx = std::log(x);
  const long double f = lx / (x * x);
  const long double f1 = (1 - 2 * lx) / (x * x * x);
  const long double f3 = (26 - 24 * lx) / (x * x * x * x * x);
  s += (lx + 1) / x + f / 2 - f1 / 12 + f3 / 720;
  const long double zeta2_prime = -s;
  const long double pi = std::numbers::pi_v<long double>;
  const long double log_a =
      (std::numbers::egamma_v<long double> + std::log(2 * pi) - 6 * zeta2_prime / (pi * pi)) / 12;
  return static_cast<double>(1.0L / 12 - log_a);
}
}  // namespace

TEST_CASE("known kappa") {
  const double z = zeta_prime_minus_one_oracle();
  CHECK(zeta_prime_minus_one() == doctest::Approx(z).epsilon(1e-12));
  CHECK(known_kappa(2.0) == doctest::Approx(std::pow(2.0, 7.0 / 12) * std::exp(3 * z)).epsilon(1e-12));
  CHECK(known_kappa(1.0) == doctest::Approx(std::pow(2.0, 13.0 / 24) * std::exp(1.5 * z)).epsilon(1e-12));
  CHECK(known_kappa(4.0) == doctest::Approx(std::pow(2.0, -13.0 / 12) * std::exp(1.5 * z)).epsilon(1e-12));
  CHECK(std::abs(known_kappa(2.0) - 0.91222) < 1e-4);
  CHECK(std::abs(known_kappa(4.0) - 0.3682) < 1e-4);
  CHECK(known_kappa(1.0) / known_kappa(4.0) == doctest::Approx(std::pow(2.0, 13.0 / 24 + 13.0 / 12)).epsilon(1e-14));
  CHECK(has_known_kappa(2.0));
  CHECK_FALSE(has_known_kappa(3.0));
  CHECK_THROWS_AS(known_kappa(3.0), DomainError);
}

TEST_CASE("gap ratio fit") {
  SUBCASE("exact recovery on its own model") {
    const std::vector<double> l = {4, 6, 8, 10, 12};
    std::vector<double> y;
    for (double x : l) y.push_back(0.5 * x - 0.5 * std::log(x) + 0.3);
    const auto f = btw_fit_values(l, y);
    CHECK(std::abs(f.slope - 0.5) < 1e-8);
    CHECK(std::abs(f.log_coefficient + 0.5) < 1e-8);
    CHECK(std::abs(f.intercept - 0.3) < 1e-8);

    std::vector<GapEstimate> e0, e1;
    for (std::size_t j = 0; j < l.size(); ++j) {
      e0.push_back({1e-3, 1e-6, 1000, Method::direct, 0});
      e1.push_back({1e-3 * std::exp(y[j]), 1e-6 * std::exp(y[j]), 1000, Method::direct, 0});
    }
    const auto g = btw_slope_check(l, e0, e1);
    CHECK(std::abs(g.slope - 0.5) < 1e-8);
    CHECK(g.slope_stderr > 0.0);
    e1[2].stderr_ = 0.5 * e1[2].value;
    CHECK_THROWS_AS(btw_slope_check(l, e0, e1), ConfigError);
  }
  SUBCASE("exact beta = 2 gap probabilities") {
    auto fit_on = [](const std::vector<double>& l) {
      std::vector<double> y;
      for (double x : l) {
        const auto p = sine_kernel_count_probs(x, 1);
        y.push_back(std::log(p[1]) - std::log(p[0]));
      }
      return btw_fit_values(l, y);
    };
    const auto wide = fit_on({8, 10, 12, 14});
    const auto narrow = fit_on({4, 6, 8, 10});
    MESSAGE("slope on {8..14}: " << wide.slope << ", on {4..10}: " << narrow.slope);
    CHECK(std::abs(wide.slope / 0.5 - 1) < 0.15);
  }
  SUBCASE("least squares") {
    const auto f = least_squares({{1, 0}, {0, 1}, {1, 1}}, {1, 2, 3});
    CHECK(f.coef[0] == doctest::Approx(1.0));
    CHECK(f.coef[1] == doctest::Approx(2.0));
    CHECK(f.condition_number == doctest::Approx(std::sqrt(3.0)));
  }
}
