#include "carousel/oracles/kappa.hpp"

#include <cmath>

#include "carousel/errors.hpp"

namespace carousel::oracles {

double log_glaisher() {
  // log A = S(n) - (n^2/2 + n/2 + 1/12) log n + n^2/4 - 1/(720 n^2) + 1/(5040 n^4) - 1/(10080 n^6)
  constexpr int n = 2000;
  long double s = 0.0L;
  for (int k = 2; k <= n; ++k) s += static_cast<long double>(k) * std::log(static_cast<long double>(k));
  const long double N = n;
  const long double ln = std::log(N);
  const long double n2 = 1.0L / (N * N);
  return static_cast<double>(s - (N * N / 2 + N / 2 + 1.0L / 12) * ln + N * N / 4 -
                             n2 / 720 + n2 * n2 / 5040 - n2 * n2 * n2 / 10080);
}

double zeta_prime_minus_one() { return 1.0 / 12.0 - log_glaisher(); }

bool has_known_kappa(double beta) { return beta == 1.0 || beta == 2.0 || beta == 4.0; }

double known_kappa(double beta) {
  const double z = zeta_prime_minus_one();
  if (beta == 1.0) return std::exp2(13.0 / 24.0) * std::exp(1.5 * z);
  if (beta == 2.0) return std::exp2(7.0 / 12.0) * std::exp(3.0 * z);
  if (beta == 4.0) return std::exp2(-13.0 / 12.0) * std::exp(1.5 * z);
  throw DomainError("known_kappa: closed form known only for beta in {1, 2, 4}");
}

}  // namespace carousel::oracles
