#include "carousel/oracles/fredholm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "carousel/errors.hpp"
#include "carousel/numerics/quadrature.hpp"

namespace carousel::oracles {

namespace {

Eigen::MatrixXd nystrom(double lambda, int order) {
  const auto gl = numerics::gauss_legendre(order);
  Eigen::VectorXd x(order);
  Eigen::VectorXd sw(order);
  for (int i = 0; i < order; ++i) {
    x(i) = 0.5 * lambda * (gl.nodes[i] + 1.0);
    sw(i) = std::sqrt(0.5 * lambda * gl.weights[i]);
  }
  Eigen::MatrixXd K(order, order);
  for (int i = 0; i < order; ++i) {
    for (int j = 0; j < order; ++j) K(i, j) = sw(i) * sine_kernel(x(i), x(j)) * sw(j);
  }
  return K;
}

}  // namespace

double sine_kernel(double x, double y) {
  const double d = x - y;
  if (std::abs(d) < 1e-8) return (1.0 - d * d / 24.0) / (2.0 * std::numbers::pi);
  return std::sin(0.5 * d) / (std::numbers::pi * d);
}

double sine_kernel_det(double lambda, int quad_order) {
  if (!(lambda >= 0.0)) throw ConfigError("sine_kernel_gap: lambda must be >= 0");
  if (quad_order < 20) throw ConfigError("sine_kernel_gap: quad_order must be >= 20");
  if (lambda == 0.0) return 1.0;
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(quad_order, quad_order) - nystrom(lambda, quad_order);
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() == Eigen::Success) {
    double logdet = 0.0;
    const auto& L = llt.matrixLLT();
    for (int i = 0; i < quad_order; ++i) logdet += 2.0 * std::log(L(i, i));
    return std::exp(logdet);
  }
  return Eigen::PartialPivLU<Eigen::MatrixXd>(A).determinant();
}

double sine_kernel_gap(double lambda, int k, int quad_order) {
  if (k != 0) throw DomainError("sine_kernel_gap supports k = 0 only");
  const double a = sine_kernel_det(lambda, quad_order);
  if (lambda == 0.0) return a;
  const double b = sine_kernel_det(lambda, 2 * quad_order);
  if (std::abs(a - b) > 1e-8 * std::abs(b)) {
    throw NumericalError("sine_kernel_gap: no convergence between orders " +
                         std::to_string(quad_order) + " and " + std::to_string(2 * quad_order) +
                         " at lambda = " + std::to_string(lambda));
  }
  return b;
}

std::vector<double> sine_kernel_count_probs(double lambda, int k_max, int quad_order) {
  if (k_max < 0) throw DomainError("sine_kernel_count_probs: k_max must be >= 0");
  if (!(lambda >= 0.0)) throw ConfigError("sine_kernel_count_probs: lambda must be >= 0");
  std::vector<double> p(static_cast<std::size_t>(k_max) + 1, 0.0);
  p[0] = 1.0;
  if (lambda == 0.0) return p;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(nystrom(lambda, quad_order));
  if (es.info() != Eigen::Success) throw NumericalError("sine_kernel_count_probs: eigensolver failed");
  // Poisson-binomial recursion over the kernel eigenvalues.
  for (int i = 0; i < quad_order; ++i) {
    const double mu = std::clamp(es.eigenvalues()(i), 0.0, 1.0);
    for (int k = k_max; k >= 0; --k) {
      p[k] = p[k] * (1.0 - mu) + (k > 0 ? p[k - 1] * mu : 0.0);
    }
  }
  return p;
}

}  // namespace carousel::oracles
