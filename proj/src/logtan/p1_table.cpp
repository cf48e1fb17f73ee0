#include "carousel/logtan/p1_table.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "carousel/errors.hpp"
#include "carousel/numerics/stats.hpp"

namespace carousel::logtan {

double p1_tail_bound(double x, double beta) {
  return std::sqrt(30.0 / beta) * std::exp(-beta / 60.0 * std::exp(x));
}

std::vector<double> default_p1_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 28; ++i) g.push_back(-8.0 + 0.5 * i);
  return g;
}

void P1Table::finalize() {
  const std::size_t n = x_grid.size();
  if (n < 2 || values.size() != n) throw ConfigError("P1Table: grid and values must match, n >= 2");
  std::vector<double> d(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double h = x_grid[k + 1] - x_grid[k];
    if (!(h > 0.0)) throw ConfigError("P1Table: grid must be strictly increasing");
    d[k] = (values[k + 1] - values[k]) / h;
  }
  slopes_.assign(n, 0.0);
  slopes_[0] = d[0];
  slopes_[n - 1] = d[n - 2];
  for (std::size_t k = 1; k + 1 < n; ++k) {
    slopes_[k] = (d[k - 1] * d[k] <= 0.0) ? 0.0 : 0.5 * (d[k - 1] + d[k]);
  }
  // Fritsch-Carlson limiter keeps each cubic piece monotone.
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (d[k] == 0.0) {
      slopes_[k] = 0.0;
      slopes_[k + 1] = 0.0;
      continue;
    }
    const double a = slopes_[k] / d[k];
    const double b = slopes_[k + 1] / d[k];
    const double r = a * a + b * b;
    if (r > 9.0) {
      const double tau = 3.0 / std::sqrt(r);
      slopes_[k] = tau * a * d[k];
      slopes_[k + 1] = tau * b * d[k];
    }
  }
}

double P1Table::operator()(double x) const {
  if (std::isnan(x)) throw NumericalError("P1Table: NaN query");
  if (slopes_.size() != x_grid.size()) throw InvariantError("P1Table queried before finalize()");
  if (x <= x_grid.front()) return values.front();
  if (x == x_grid.back()) return values.back();
  if (x > x_grid.back()) return std::min(values.back(), p1_tail_bound(x, beta));
  const auto it = std::upper_bound(x_grid.begin(), x_grid.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - x_grid.begin()) - 1;
  const double h = x_grid[k + 1] - x_grid[k];
  const double s = (x - x_grid[k]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double v = (2 * s3 - 3 * s2 + 1) * values[k] + (s3 - 2 * s2 + s) * h * slopes_[k] +
                   (-2 * s3 + 3 * s2) * values[k + 1] + (s3 - s2) * h * slopes_[k + 1];
  return std::clamp(v, 0.0, 1.0);
}

void P1Table::require_beta(double b) const {
  if (std::abs(b - beta) > 1e-12 * std::max(1.0, std::abs(beta))) {
    throw ConfigError("P1 table was built for beta = " + std::to_string(beta) +
                      ", requested beta = " + std::to_string(b));
  }
}

std::string P1Table::to_json() const {
  nlohmann::ordered_json j;
  j["schema"] = "p1-table";
  j["schema_version"] = kVersion;
  j["beta"] = beta;
  j["horizon"] = horizon;
  j["dt"] = dt;
  j["seed"] = seed;
  j["n_per_point"] = n_per_point;
  j["interpolation"] = interpolation;
  j["x_grid"] = x_grid;
  j["raw_values"] = raw_values;
  j["regressed_values"] = values;
  j["stderrs"] = stderrs;
  return j.dump(2) + "\n";
}

P1Table P1Table::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("P1 table: invalid JSON: ") + e.what());
  }
  try {
    if (j.at("schema").get<std::string>() != "p1-table") throw ConfigError("not a P1 table file");
    if (j.at("schema_version").get<int>() != kVersion) {
      throw ConfigError("unsupported P1 table schema_version");
    }
    P1Table t;
    t.beta = j.at("beta").get<double>();
    t.horizon = j.at("horizon").get<double>();
    t.dt = j.at("dt").get<double>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.n_per_point = j.at("n_per_point").get<std::size_t>();
    t.interpolation = j.at("interpolation").get<std::string>();
    t.x_grid = j.at("x_grid").get<std::vector<double>>();
    t.raw_values = j.at("raw_values").get<std::vector<double>>();
    t.values = j.at("regressed_values").get<std::vector<double>>();
    t.stderrs = j.at("stderrs").get<std::vector<double>>();
    if (t.interpolation != "monotone-cubic") throw ConfigError("unknown P1 interpolation tag");
    t.finalize();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("P1 table: ") + e.what());
  }
}

void P1Table::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << to_json();
}

P1Table P1Table::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read P1 table " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

P1Table build_p1_table(const std::vector<double>& x_grid, double beta, std::size_t n_per_point,
                       double horizon, std::uint64_t seed, const LogtanConfig& cfg) {
  if (x_grid.size() < 2) throw ConfigError("P1 table grid needs at least two points");
  for (std::size_t k = 1; k < x_grid.size(); ++k) {
    if (!(x_grid[k] > x_grid[k - 1])) throw ConfigError("P1 table grid must be increasing");
  }
  if (x_grid.front() > -8.0 || x_grid.back() < 6.0) {
    throw ConfigError("P1 table grid must cover [-8, 6]");
  }
  P1Table t;
  t.beta = beta;
  t.horizon = horizon;
  t.dt = cfg.dt;
  t.seed = seed;
  t.n_per_point = n_per_point;
  t.x_grid = x_grid;
  for (std::size_t k = 0; k < x_grid.size(); ++k) {
    const auto e = estimate_p1(x_grid[k], beta, n_per_point, horizon, seed, cfg,
                               static_cast<std::uint64_t>(k) << 32);
    t.raw_values.push_back(e.value);
    t.stderrs.push_back(e.stderr_);
  }
  t.values = numerics::isotonic_nonincreasing(t.raw_values);
  for (double& v : t.values) v = std::clamp(v, 0.0, 1.0);
  t.finalize();
  return t;
}

}  // namespace carousel::logtan
