#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

namespace carousel {

enum class Method { direct, importance, oracle_matrix, oracle_fredholm };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

/// A Monte Carlo (or oracle) estimate of a gap probability.
struct GapEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t n_samples = 0;
  Method method = Method::direct;
  std::uint64_t seed = 0;
};

/// Sample mean and standard error (sample sd / sqrt(n)), summed in index order.
struct SampleSummary {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

SampleSummary summarize(std::span<const double> xs);

/// |a - b| / sqrt(sa^2 + sb^2); zero when both errors vanish and a == b.
double z_score(double a, double sa, double b, double sb);

}  // namespace carousel
