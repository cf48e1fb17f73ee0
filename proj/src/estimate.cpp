#include "carousel/estimate.hpp"

#include <cmath>
#include <limits>

#include "carousel/errors.hpp"

namespace carousel {

std::string to_string(Method m) {
  switch (m) {
    case Method::direct: return "direct";
    case Method::importance: return "importance";
    case Method::oracle_matrix: return "oracle-matrix";
    case Method::oracle_fredholm: return "oracle-fredholm";
  }
  return "unknown";
}

Method method_from_string(const std::string& s) {
  if (s == "direct") return Method::direct;
  if (s == "importance") return Method::importance;
  if (s == "oracle-matrix") return Method::oracle_matrix;
  if (s == "oracle-fredholm") return Method::oracle_fredholm;
  throw ConfigError("unknown method tag '" + s + "'");
}

SampleSummary summarize(std::span<const double> xs) {
  SampleSummary s;
  s.n = xs.size();
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n < 2) return s;
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.stderr_ = std::sqrt(ss / static_cast<double>(s.n - 1) / static_cast<double>(s.n));
  return s;
}

double z_score(double a, double sa, double b, double sb) {
  const double s = std::sqrt(sa * sa + sb * sb);
  const double d = std::abs(a - b);
  if (s == 0.0) return d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return d / s;
}

}  // namespace carousel
