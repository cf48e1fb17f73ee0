#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "carousel/io/report.hpp"

namespace carousel::validate {

/// Sample sizes of the acceptance suite.
struct Budget {
  std::size_t oracle_direct_n = 100'000;
  std::size_t matrix_n = 400;
  std::size_t matrix_samples = 2000;
  std::size_t is_n = 100'000;          ///< per (beta, lambda), both estimators
  std::size_t kappa_n = 100'000;       ///< per lambda
  std::size_t table_n = 4000;          ///< paths per P1 grid point
  std::size_t g_paths = 100;
  std::size_t martingale_paths = 10'000;
  double martingale_horizon = 40.0;
  std::size_t coupling_triples = 1000;
  std::size_t z_samples = 100'000;
  double z_burn_in = 12.0;
  std::size_t btw_e0_n = 20'000;
  std::size_t btw_e1_n = 100'000;

  static Budget full() { return {}; }
  /// Reduced sizes for smoke runs; tolerances are unchanged.
  static Budget quick();
};

struct ValidateConfig {
  Budget budget = Budget::full();
  bool quick = false;
  unsigned threads = 0;
  std::uint64_t seed = 20'250'101;
  std::vector<int> criteria;  ///< empty = all
  /// Criterion 11 runs `<cli_path> validate ...` twice when set, in-process otherwise.
  std::string cli_path;
  /// Scratch directory for criterion 11.
  std::string work_dir = "validate-repro";
};

/// One comparison behind a verdict: passed iff `value op bound`.
struct Check {
  std::string label;
  double value = 0.0;
  std::string op;  ///< "<=", "<" or ">="
  double bound = 0.0;
  bool passed = false;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  std::vector<Check> checks;
  io::Json data = io::Json::object();
  double seconds = 0.0;  ///< wall time; kept out of the numerical report
};

struct ValidationReport {
  std::vector<CriterionResult> results;
  bool all_passed() const;
};

inline constexpr int kCriterionCount = 11;
std::string criterion_name(int id);

/// Runs the selected criteria in increasing order. on_result is called as each finishes.
ValidationReport run_validation(const ValidateConfig& cfg,
                                const std::function<void(const CriterionResult&)>& on_result = {});

/// Everything except timings; identical for identical configs whatever the thread count.
io::Json numerical_json(const ValidationReport& r, const ValidateConfig& cfg);
/// Timings, thread count and budgets.
io::Json manifest_json(const ValidationReport& r, const ValidateConfig& cfg, double wall_seconds);
/// One row per check.
std::string checks_csv(const ValidationReport& r);
/// "PASS  1 oracle-triangle  <detail>  (12.3 s)"
std::string summary_line(const CriterionResult& c);

/// Parses "1,2,5" or "1-4,7"; throws ConfigError for ids outside 1..11.
std::vector<int> parse_criteria(const std::string& text);

}  // namespace carousel::validate
