#pragma once

#include <functional>
#include <vector>

namespace carousel::numerics {

/// Adaptive Simpson quadrature of fn over [a, b] to the given relative tolerance
/// (absolute floor abs_tol). Throws NumericalError when max_depth is exhausted.
double adaptive_simpson(const std::function<double(double)>& fn, double a, double b,
                        double rel_tol = 1e-10, double abs_tol = 1e-14, int max_depth = 50);

struct GaussLegendre {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule by Newton iteration on the Legendre recurrence.
GaussLegendre gauss_legendre(int n);

}  // namespace carousel::numerics
