#pragma once

#include <vector>

namespace carousel::oracles {

/// sin((x - y)/2) / (pi (x - y)), equal to 1/(2 pi) on the diagonal.
double sine_kernel(double x, double y);

/// det(I - K) on [0, lambda] by Nystrom with a quad_order-point Gauss-Legendre rule,
/// Cholesky of the symmetrized matrix. Recomputes at 2 * quad_order and throws
/// NumericalError when the relative change exceeds 1e-8. Only k = 0 is supported.
double sine_kernel_gap(double lambda, int k = 0, int quad_order = 60);

/// det(I - K) at one order, without the convergence check.
double sine_kernel_det(double lambda, int quad_order);

/// Probabilities of exactly k = 0..k_max points in [0, lambda] at beta = 2, from the
/// eigenvalues of the Nystrom matrix (the count is a sum of independent Bernoullis).
std::vector<double> sine_kernel_count_probs(double lambda, int k_max, int quad_order = 80);

}  // namespace carousel::oracles
