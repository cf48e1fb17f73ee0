#include "carousel/model.hpp"

#include <cmath>
#include <string>

#include "carousel/errors.hpp"

namespace carousel {

double speed_f(double t, double beta) { return 0.25 * beta * std::exp(-0.25 * beta * t); }

double cumulative_f(double t, double beta) { return -std::expm1(-0.25 * beta * t); }

ModelParams::ModelParams(double beta_, double lambda_) : beta(beta_), lambda(lambda_) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ConfigError("beta must be positive and finite, got " + std::to_string(beta));
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("lambda must be non-negative and finite, got " + std::to_string(lambda));
  }
}

double ModelParams::T() const {
  if (lambda < 1.0) throw DomainError("T = (4/beta) log(lambda) needs lambda >= 1");
  return 4.0 / beta * std::log(lambda);
}

double ModelParams::log_leading_order() const {
  if (!(lambda > 0.0)) throw DomainError("leading-order term needs lambda > 0");
  return gamma_beta() * std::log(lambda) - beta / 64.0 * lambda * lambda +
         (beta / 8.0 - 0.25) * lambda;
}

}  // namespace carousel
