#include "carousel/oracles/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "carousel/errors.hpp"
#include "carousel/parallel.hpp"

namespace carousel::oracles {

namespace {
constexpr std::uint64_t kMatrixDomain = 0x7472696469616700ULL;
}

Tridiagonal tridiagonal_beta_matrix(std::size_t n, double beta, sde::CounterRng& rng) {
  if (n < 2) throw ConfigError("tridiagonal model needs n >= 2");
  if (!(beta > 0.0)) throw ConfigError("tridiagonal model needs beta > 0");
  if (n > kMaxTridiagonalN) throw ConfigError("n = " + std::to_string(n) + " exceeds the budget");
  const double scale = 1.0 / std::sqrt(beta);
  Tridiagonal m;
  m.diag.resize(n);
  m.off.resize(n - 1);
  for (std::size_t k = 0; k < n; ++k) m.diag[k] = scale * std::sqrt(2.0) * rng.normal();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    m.off[k] = scale * rng.chi(beta * static_cast<double>(n - 1 - k));
  }
  return m;
}

std::size_t sturm_count(const Tridiagonal& m, double x) {
  const std::size_t n = m.diag.size();
  std::size_t count = 0;
  double d = m.diag[0] - x;
  constexpr double kTiny = 1e-300;
  if (d == 0.0) d = -kTiny;
  if (d < 0.0) ++count;
  for (std::size_t k = 1; k < n; ++k) {
    const double b = m.off[k - 1];
    d = m.diag[k] - x - b * b / d;
    if (d == 0.0) d = -kTiny;
    if (d < 0.0) ++count;
  }
  return count;
}

std::pair<double, double> gershgorin(const Tridiagonal& m) {
  const std::size_t n = m.diag.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t k = 0; k < n; ++k) {
    double r = 0.0;
    if (k > 0) r += std::abs(m.off[k - 1]);
    if (k + 1 < n) r += std::abs(m.off[k]);
    lo = std::min(lo, m.diag[k] - r);
    hi = std::max(hi, m.diag[k] + r);
  }
  return {lo - 1e-12, hi + 1e-12};
}

double eigenvalue_by_bisection(const Tridiagonal& m, std::size_t k, double tol) {
  if (k >= m.diag.size()) throw DomainError("eigenvalue index out of range");
  auto [lo, hi] = gershgorin(m);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(m, mid) > k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> tridiagonal_eigenvalues(const Tridiagonal& m, double tol) {
  std::vector<double> ev(m.diag.size());
  for (std::size_t k = 0; k < ev.size(); ++k) ev[k] = eigenvalue_by_bisection(m, k, tol);
  return ev;
}

std::vector<double> eigenvalues_in(const Tridiagonal& m, double lo, double hi, double tol) {
  if (!(hi >= lo)) throw ConfigError("eigenvalues_in: empty interval");
  const std::size_t a = sturm_count(m, lo);
  const std::size_t b = sturm_count(m, hi);
  std::vector<double> ev;
  for (std::size_t k = a; k < b; ++k) ev.push_back(eigenvalue_by_bisection(m, k, tol));
  return ev;
}

SpectrumSample sample_tridiagonal_beta(std::size_t n, double beta, std::uint64_t seed,
                                       std::uint64_t stream) {
  sde::CounterRng rng(seed, stream, kMatrixDomain);
  const auto m = tridiagonal_beta_matrix(n, beta, rng);
  return SpectrumSample{n, beta, tridiagonal_eigenvalues(m), seed};
}

namespace {

double bulk_scale(std::size_t n, double mu) {
  const double rn = std::sqrt(static_cast<double>(n));
  const double edge = 2.0 * rn * (1.0 - std::cbrt(1.0 / static_cast<double>(n)));
  if (!(std::abs(mu) < edge)) {
    throw DomainError("mu = " + std::to_string(mu) + " is outside the bulk window |mu| < " +
                      std::to_string(edge));
  }
  return std::sqrt(4.0 * static_cast<double>(n) - mu * mu);
}

}  // namespace

std::vector<double> bulk_rescale(const SpectrumSample& sample, double mu) {
  const double s = bulk_scale(sample.n, mu);
  std::vector<double> out(sample.eigenvalues.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * (sample.eigenvalues[i] - mu);
  return out;
}

std::vector<std::vector<double>> bulk_window_samples(std::size_t n, double beta, double mu,
                                                     double window, std::size_t count,
                                                     std::uint64_t seed, unsigned threads) {
  if (!(window >= 0.0)) throw ConfigError("bulk window must be non-negative");
  const double s = bulk_scale(n, mu);
  std::vector<std::vector<double>> out(count);
  parallel_for(count, threads, [&](std::size_t i) {
    sde::CounterRng rng(seed, i, kMatrixDomain);
    const auto m = tridiagonal_beta_matrix(n, beta, rng);
    auto ev = eigenvalues_in(m, mu, mu + window / s, 1e-10 / s);
    for (double& v : ev) v = s * (v - mu);
    out[i] = std::move(ev);
  });
  return out;
}

GapEstimate empirical_gap_prob(const std::vector<std::vector<double>>& samples, double lambda,
                               int k, std::uint64_t seed) {
  if (samples.size() < 100) throw ConfigError("empirical_gap_prob needs at least 100 samples");
  if (k < 0) throw DomainError("empirical_gap_prob: k must be non-negative");
  std::size_t hits = 0;
  for (const auto& pts : samples) {
    const auto c = std::count_if(pts.begin(), pts.end(),
                                 [lambda](double x) { return x >= 0.0 && x <= lambda; });
    if (c == k) ++hits;
  }
  const double n = static_cast<double>(samples.size());
  const double p = static_cast<double>(hits) / n;
  return GapEstimate{p, std::sqrt(p * (1.0 - p) / n), samples.size(), Method::oracle_matrix, seed};
}

}  // namespace carousel::oracles
