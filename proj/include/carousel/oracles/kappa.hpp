#pragma once

namespace carousel::oracles {

/// log A for the Glaisher-Kinkelin constant A, from the Euler-Maclaurin expansion of
/// sum_{k<=n} k log k in long double.
double log_glaisher();

/// zeta'(-1) = 1/12 - log A.
double zeta_prime_minus_one();

/// Closed-form kappa_beta for beta in {1, 2, 4}; DomainError otherwise.
double known_kappa(double beta);

bool has_known_kappa(double beta);

}  // namespace carousel::oracles
