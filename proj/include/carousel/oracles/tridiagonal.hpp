#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "carousel/estimate.hpp"
#include "carousel/sde/philox.hpp"

namespace carousel::oracles {

/// Symmetric tridiagonal matrix: diag[0..n), off[0..n-1) with off[k] = M(k, k+1).
struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;
};

/// (1/sqrt(beta)) * tridiag(N(0,2) diagonal, chi_{beta(n-k)} off-diagonal), whose
/// eigenvalue density is proportional to prod |l_i - l_j|^beta exp(-beta sum l_i^2 / 4).
Tridiagonal tridiagonal_beta_matrix(std::size_t n, double beta, sde::CounterRng& rng);

/// Number of eigenvalues strictly below x (sign changes of the Sturm sequence).
std::size_t sturm_count(const Tridiagonal& m, double x);

/// Gershgorin interval containing the spectrum.
std::pair<double, double> gershgorin(const Tridiagonal& m);

/// Eigenvalue of index k (0-based, ascending) by bisection to absolute tolerance tol.
double eigenvalue_by_bisection(const Tridiagonal& m, std::size_t k, double tol = 1e-10);

/// All eigenvalues, ascending.
std::vector<double> tridiagonal_eigenvalues(const Tridiagonal& m, double tol = 1e-10);

/// Eigenvalues in [lo, hi], ascending.
std::vector<double> eigenvalues_in(const Tridiagonal& m, double lo, double hi, double tol = 1e-10);

struct SpectrumSample {
  std::size_t n = 0;
  double beta = 0.0;
  std::vector<double> eigenvalues;
  std::uint64_t seed = 0;
};

/// Largest accepted n (memory and time budget of the bisection solver).
inline constexpr std::size_t kMaxTridiagonalN = 1'000'000;

/// Full spectrum of one matrix; sample index `stream` of `seed`.
SpectrumSample sample_tridiagonal_beta(std::size_t n, double beta, std::uint64_t seed,
                                       std::uint64_t stream = 0);

/// sqrt(4n - mu^2) (eigenvalues - mu). Throws DomainError outside the bulk window
/// |mu| < 2 sqrt(n) (1 - n^{-1/3}).
std::vector<double> bulk_rescale(const SpectrumSample& sample, double mu);

/// Rescaled points in [0, window] around mu for `count` independent matrices (sample i
/// uses stream i), computing only the eigenvalues inside the window.
std::vector<std::vector<double>> bulk_window_samples(std::size_t n, double beta, double mu,
                                                     double window, std::size_t count,
                                                     std::uint64_t seed, unsigned threads = 0);

/// Fraction of samples with exactly k points in [0, lambda], binomial stderr,
/// method = oracle-matrix. Needs at least 100 samples.
GapEstimate empirical_gap_prob(const std::vector<std::vector<double>>& samples, double lambda,
                               int k, std::uint64_t seed = 0);

}  // namespace carousel::oracles
