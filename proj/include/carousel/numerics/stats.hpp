#pragma once

#include <functional>
#include <span>
#include <vector>

namespace carousel::numerics {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test (asymptotic Kolmogorov distribution with the
/// Stephens small-sample correction).
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
TestResult ks_one_sample(std::vector<double> data, const std::function<double(double)>& cdf);

/// Pearson chi-square goodness of fit of observed counts to expected counts.
TestResult chi_square(std::span<const double> observed, std::span<const double> expected,
                      int dof_reduction = 1);

/// Survival function of the Kolmogorov distribution, P(K > x).
double kolmogorov_sf(double x);

/// Nonincreasing least-squares fit (pool adjacent violators) with optional weights.
std::vector<double> isotonic_nonincreasing(std::span<const double> y,
                                           std::span<const double> weights = {});

}  // namespace carousel::numerics
