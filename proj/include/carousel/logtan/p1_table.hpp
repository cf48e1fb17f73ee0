#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "carousel/logtan/logtan.hpp"

namespace carousel::logtan {

/// Tabulated p_1(x) after nonincreasing regression, with monotone cubic (Fritsch-Carlson)
/// interpolation inside the grid, the left-end value below it, and the tail bound
/// sqrt(30/beta) exp(-(beta/60) e^x), capped by the last value, above it.
struct P1Table {
  static constexpr int kVersion = 1;

  double beta = 2.0;
  double horizon = 0.0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::size_t n_per_point = 0;
  std::string interpolation = "monotone-cubic";
  std::vector<double> x_grid;
  std::vector<double> raw_values;
  std::vector<double> values;  ///< regressed
  std::vector<double> stderrs;

  double operator()(double x) const;

  /// Rebuilds the interpolation slopes; call after editing values by hand.
  void finalize();

  std::string to_json() const;
  static P1Table from_json(const std::string& text);
  void save(const std::string& path) const;
  static P1Table load(const std::string& path);

  /// Throws ConfigError when the table was built for another beta.
  void require_beta(double beta) const;

 private:
  std::vector<double> slopes_;
};

/// sqrt(30/beta) exp(-(beta/60) e^x).
double p1_tail_bound(double x, double beta);

std::vector<double> default_p1_grid();

/// Estimates p_1 at each grid point (independent streams per (point, path)), regresses
/// to a nonincreasing sequence (unweighted) and fits the interpolant. The
/// grid must be increasing and cover [-8, 6].
P1Table build_p1_table(const std::vector<double>& x_grid, double beta, std::size_t n_per_point,
                       double horizon, std::uint64_t seed, const LogtanConfig& cfg = {});

}  // namespace carousel::logtan
