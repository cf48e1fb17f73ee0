// carousel: batch front end for the Sine_beta gap-probability engine.
//
// Config files hold one `key = value` per line, where key is a long option name of the
// chosen subcommand without the leading dashes; blank lines and lines starting with '#'
// are ignored. Command-line flags override the file, which overrides the defaults.
// CAROUSEL_OUT replaces the default output directory.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "carousel/errors.hpp"
#include "carousel/estimate.hpp"
#include "carousel/io/report.hpp"
#include "carousel/logtan/logtan.hpp"
#include "carousel/logtan/p1_table.hpp"
#include "carousel/model.hpp"
#include "carousel/oracles/fredholm.hpp"
#include "carousel/oracles/kappa.hpp"
#include "carousel/oracles/tridiagonal.hpp"
#include "carousel/parallel.hpp"
#include "carousel/sine/phase.hpp"
#include "carousel/tilt/estimator.hpp"
#include "carousel/tilt/girsanov.hpp"
#include "carousel/validate/pipeline.hpp"

namespace {

using namespace carousel;
using io::Json;
namespace fs = std::filesystem;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Common {
  std::string out;
  std::string config;
  unsigned threads = 0;
  bool emit_plot = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--config", c.config, "key=value config file");
  sub->add_option("--threads", c.threads, "worker threads (0 = all cores)");
  sub->add_flag("--emit-plot-data", c.emit_plot, "also write (x, y, yerr) triples");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Reads a config file into --key=value tokens.
std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::vector<std::string> tokens;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty() || key == "config") {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": invalid key '" + key + "'");
    }
    tokens.push_back("--" + key + "=" + value);
  }
  return tokens;
}

// Splices the tokens of any --config file in right after the subcommand words, so that
// flags given on the command line (which come later) take precedence.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::size_t words = 0;
  while (words < args.size() && words < 2 && !args[words].empty() && args[words][0] != '-') {
    ++words;
    if (args[0] != "oracle") break;
  }
  auto tokens = config_tokens(path);
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(words), tokens.begin(), tokens.end());
  return args;
}

std::vector<double> parse_list(const std::string& text, const std::string& name) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) {
      throw ConfigError("--" + name + ": '" + item + "' is not a number");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("--" + name + ": empty list");
  return out;
}

std::string list_text(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ",") + io::format_double(x);
  return s;
}

std::string value_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return io::format_double(v.get<double>());
  return v.dump();
}

// The config that determines the numbers of a run, in the same grammar as --config.
std::string config_text(const Json& cfg) {
  std::string s;
  for (const auto& [k, v] : cfg.items()) s += k + " = " + value_text(v) + "\n";
  return s;
}

class Run {
 public:
  Run(std::string command, const Common& c, Json config)
      : command_(std::move(command)), common_(c), config_(std::move(config)),
        start_(std::chrono::steady_clock::now()) {
    dir_ = c.out;
    if (dir_.empty()) {
      const char* env = std::getenv("CAROUSEL_OUT");
      dir_ = (env && *env) ? env : "out";
    }
  }

  const Json& config() const { return config_; }

  Json report(const std::string& kind) const {
    Json j;
    j["schema_version"] = io::kSchemaVersion;
    j["kind"] = kind;
    j["config"] = config_;
    return j;
  }

  void write(const std::string& name, const std::string& content) const {
    const auto p = io::write_file(dir_, name, content);
    std::cout << "wrote " << p.string() << "\n";
  }

  void plot(const std::string& name, const std::vector<double>& x, const std::vector<double>& y,
            const std::vector<double>& e) const {
    if (common_.emit_plot) write(name, io::plot_data(x, y, e));
  }

  void finish(Json extra = Json::object()) const {
    write(command_ + ".config", config_text(config_));
    Json m;
    m["schema_version"] = io::kSchemaVersion;
    m["kind"] = "manifest";
    m["command"] = command_;
    m["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    m["threads"] = common_.threads == 0 ? default_threads() : common_.threads;
    m["hardware_concurrency"] = default_threads();
    for (const auto& [k, v] : extra.items()) m[k] = v;
    write("manifest.json", io::dump(m));
  }

 private:
  std::string command_;
  Common common_;
  Json config_;
  std::chrono::steady_clock::time_point start_;
  fs::path dir_;
};

Json estimate_row(const GapEstimate& e) { return io::to_json(e); }

// ---- gap-direct ---------------------------------------------------------------------
struct GapDirectArgs {
  Common c;
  double beta = 2.0;
  double lambda = 2.0;
  int k = 0;
  std::size_t n = 100'000;
  std::uint64_t seed = 1;
  double dt = 0.0;
  double drift_tolerance = 1e-4;
};

int cmd_gap_direct(const GapDirectArgs& a) {
  const ModelParams p(a.beta, a.lambda);
  if (a.k < 0) throw ConfigError("--k must be >= 0, got " + std::to_string(a.k));
  if (a.n < 2) throw ConfigError("--n must be >= 2");
  Run run("gap-direct", a.c,
          {{"beta", a.beta}, {"lambda", a.lambda}, {"k", a.k}, {"n", a.n}, {"seed", a.seed},
           {"dt", a.dt}, {"drift-tolerance", a.drift_tolerance}});
  sine::PhaseConfig pc;
  pc.dt = a.dt;
  pc.drift_tolerance = a.drift_tolerance;
  pc.threads = a.c.threads;
  const auto d = sine::estimate_gap_direct_all(p, a.k, a.n, a.seed, pc);
  const auto& e = d.by_k[static_cast<std::size_t>(a.k)];

  io::CsvTable csv({"method", "beta", "lambda", "k", "value", "stderr", "n_samples", "seed"});
  csv.add_row({to_string(e.method), io::format_double(a.beta), io::format_double(a.lambda),
               std::to_string(a.k), io::format_double(e.value), io::format_double(e.stderr_),
               std::to_string(e.n_samples), std::to_string(e.seed)});
  run.write("gap_direct.csv", csv.str());

  Json j = run.report("gap-direct");
  j["estimate"] = estimate_row(e);
  Json by_k = Json::array();
  for (const auto& x : d.by_k) by_k.push_back(estimate_row(x));
  j["by_k"] = by_k;
  j["mean_count"] = d.mean_count;
  j["mean_count_stderr"] = d.mean_count_stderr;
  j["dt"] = d.dt;
  j["horizon"] = d.horizon;
  j["bias_bound"] = d.bias_bound;
  run.write("gap_direct.json", io::dump(j));

  std::vector<double> ks, vs, es;
  for (std::size_t i = 0; i < d.by_k.size(); ++i) {
    ks.push_back(static_cast<double>(i));
    vs.push_back(d.by_k[i].value);
    es.push_back(d.by_k[i].stderr_);
  }
  run.plot("gap_direct.plot.txt", ks, vs, es);
  run.finish({{"dt", d.dt}, {"horizon", d.horizon}, {"drift_tolerance", a.drift_tolerance}});
  std::printf("E(%d; %g) = %.6f +- %.6f (direct, n = %zu)\n", a.k, a.lambda, e.value, e.stderr_,
              e.n_samples);
  return 0;
}

// ---- gap-is -------------------------------------------------------------------------
struct GapIsArgs {
  Common c;
  double beta = 2.0;
  double lambda = 4.0;
  std::size_t n = 100'000;
  std::uint64_t seed = 1;
  std::string table;
  double dt = 1e-3;
  std::size_t preflight = 100;
};

// RMS of G_direct + (closed-form -G) over `paths` Y paths.
double g_preflight(const ModelParams& p, std::size_t paths, std::uint64_t seed,
                   const tilt::TiltConfig& tc) {
  std::vector<double> e(paths);
  parallel_for(paths, tc.threads, [&](std::size_t i) {
    const sde::NoiseStream s{seed, (std::uint64_t{1} << 63) + i, 1};
    const auto path = tilt::simulate_Y(p, s, tc);
    e[i] = tilt::G_direct(path, p) + tilt::G_closed_form(path, p).total;
  });
  double sum = 0.0;
  for (double x : e) sum += x * x;
  return paths == 0 ? 0.0 : std::sqrt(sum / static_cast<double>(paths));
}

int cmd_gap_is(const GapIsArgs& a) {
  const ModelParams p(a.beta, a.lambda);
  if (!(a.lambda > 1.0)) throw ConfigError("--lambda must be > 1 for the importance sampler");
  if (a.table.empty()) throw ConfigError("--table is required");
  if (!fs::exists(a.table)) throw ConfigError("--table: no such file " + a.table);
  const auto table = logtan::P1Table::load(a.table);
  table.require_beta(a.beta);
  Run run("gap-is", a.c,
          {{"beta", a.beta}, {"lambda", a.lambda}, {"n", a.n}, {"seed", a.seed},
           {"table", a.table}, {"dt", a.dt}, {"preflight", a.preflight}});
  tilt::TiltConfig tc;
  tc.dt = a.dt;
  tc.threads = a.c.threads;
  const double rms = g_preflight(p, a.preflight, a.seed, tc);
  const auto r = tilt::estimate_p_lambda_IS(p, table, a.n, a.seed, tc);

  io::CsvTable csv({"method", "beta", "lambda", "k", "value", "stderr", "n_samples", "seed"});
  csv.add_row({to_string(r.estimate.method), io::format_double(a.beta), io::format_double(a.lambda),
               "0", io::format_double(r.estimate.value), io::format_double(r.estimate.stderr_),
               std::to_string(r.estimate.n_samples), std::to_string(r.estimate.seed)});
  run.write("gap_is.csv", csv.str());

  Json j = run.report("gap-is");
  j["estimate"] = estimate_row(r.estimate);
  j["m"] = r.m;
  j["m_stderr"] = r.m_stderr;
  j["m_table_stderr"] = r.m_table_stderr;
  j["log_prefactor"] = r.log_prefactor;
  j["offset"] = r.offset;
  j["delta"] = r.delta;
  j["entrance_budget"] = r.entrance_budget;
  j["max_psi"] = r.max_psi;
  j["mean_leaves"] = r.mean_leaves;
  j["g_equivalence_rms"] = rms;
  j["g_equivalence_paths"] = a.preflight;
  j["table"] = {{"n_per_point", table.n_per_point}, {"seed", table.seed}, {"horizon", table.horizon}};
  run.write("gap_is.json", io::dump(j));
  run.plot("gap_is.plot.txt", {a.lambda}, {r.estimate.value}, {r.estimate.stderr_});
  run.finish({{"dt", a.dt}, {"warm_start_delta", r.delta}, {"entrance_budget", r.entrance_budget}});
  std::printf("p(%g) = %.6e +- %.2e (importance, n = %zu), m = %.5f, G rms %.4f\n", a.lambda,
              r.estimate.value, r.estimate.stderr_, a.n, r.m, rms);
  return 0;
}

// ---- p1-table -----------------------------------------------------------------------
struct P1Args {
  Common c;
  double beta = 2.0;
  std::size_t n_per_point = 4000;
  std::uint64_t seed = 1;
  double dt = 1e-3;
  double tail_tolerance = 1e-4;
  double x_max = 25.0;
};

Json table_report(const logtan::P1Table& t, const Json& config) {
  Json j = Json::parse(t.to_json());
  j["config"] = config;
  return j;
}

int cmd_p1_table(const P1Args& a) {
  Run run("p1-table", a.c,
          {{"beta", a.beta}, {"n-per-point", a.n_per_point}, {"seed", a.seed}, {"dt", a.dt},
           {"tail-tolerance", a.tail_tolerance}, {"x-max", a.x_max}});
  if (!(a.tail_tolerance > 0.0 && a.tail_tolerance < 1.0)) {
    throw ConfigError("--tail-tolerance must lie in (0, 1)");
  }
  logtan::LogtanConfig lc;
  lc.dt = a.dt;
  lc.x_max = a.x_max;
  lc.threads = a.c.threads;
  const double horizon = logtan::p1_default_horizon(a.beta, a.tail_tolerance);
  const auto t =
      logtan::build_p1_table(logtan::default_p1_grid(), a.beta, a.n_per_point, horizon, a.seed, lc);
  run.write("p1_table.json", io::dump(table_report(t, run.config())));
  io::CsvTable csv({"x", "raw_value", "value", "stderr", "tail_bound"});
  for (std::size_t k = 0; k < t.x_grid.size(); ++k) {
    csv.add_row({io::format_double(t.x_grid[k]), io::format_double(t.raw_values[k]),
                 io::format_double(t.values[k]), io::format_double(t.stderrs[k]),
                 io::format_double(logtan::p1_tail_bound(t.x_grid[k], a.beta))});
  }
  run.write("p1_table.csv", csv.str());
  run.plot("p1_table.plot.txt", t.x_grid, t.values, t.stderrs);
  run.finish({{"dt", a.dt}, {"horizon", horizon}, {"tail_tolerance", a.tail_tolerance},
              {"x_max", a.x_max}});
  return 0;
}

// ---- kappa --------------------------------------------------------------------------
struct KappaArgs {
  Common c;
  double beta = 2.0;
  std::string lambdas = "8,16,32,64";
  std::size_t n = 100'000;
  std::uint64_t seed = 1;
  std::string table;
  std::size_t table_n = 4000;
  double dt = 1e-3;
};

int cmd_kappa(const KappaArgs& a) {
  const auto lambdas = parse_list(a.lambdas, "lambdas");
  const ModelParams check(a.beta, 1.0);
  Json cfg = {{"beta", a.beta}, {"lambdas", list_text(lambdas)}, {"n", a.n}, {"seed", a.seed},
              {"table", a.table}, {"table-n", a.table_n}, {"dt", a.dt}};
  Run run("kappa", a.c, cfg);
  logtan::P1Table table;
  if (!a.table.empty()) {
    if (!fs::exists(a.table)) throw ConfigError("--table: no such file " + a.table);
    table = logtan::P1Table::load(a.table);
    table.require_beta(a.beta);
  } else {
    logtan::LogtanConfig lc;
    lc.threads = a.c.threads;
    table = logtan::build_p1_table(logtan::default_p1_grid(), a.beta, a.table_n,
                                   logtan::p1_default_horizon(a.beta), a.seed + 1'000'000, lc);
    run.write("p1_table.json", io::dump(table_report(table, run.config())));
  }
  tilt::TiltConfig tc;
  tc.dt = a.dt;
  tc.threads = a.c.threads;
  const auto k = tilt::estimate_kappa(a.beta, lambdas, table, a.n, a.seed, tc);

  Json j = run.report("kappa");
  j["lambdas"] = k.lambdas;
  j["m"] = k.m;
  j["m_stderr"] = k.m_stderr;
  Json p = Json::array();
  for (const auto& r : k.runs) p.push_back(estimate_row(r.estimate));
  j["p_hat"] = p;
  j["kappa_hat"] = k.kappa_hat;
  j["kappa_stderr"] = k.kappa_stderr;
  if (oracles::has_known_kappa(a.beta)) {
    const double target = oracles::known_kappa(a.beta);
    j["target"] = target;
    j["relative_error"] = k.kappa_hat / target - 1.0;
  } else {
    j["target"] = nullptr;
  }
  j["non_monotone_steps"] = k.non_monotone_steps;
  run.write("kappa.json", io::dump(j));

  io::CsvTable csv({"lambda", "m", "m_stderr", "p_hat", "p_stderr"});
  for (std::size_t i = 0; i < k.lambdas.size(); ++i) {
    csv.add_row({io::format_double(k.lambdas[i]), io::format_double(k.m[i]),
                 io::format_double(k.m_stderr[i]), io::format_double(k.runs[i].estimate.value),
                 io::format_double(k.runs[i].estimate.stderr_)});
  }
  run.write("kappa.csv", csv.str());
  run.plot("kappa.plot.txt", k.lambdas, k.m, k.m_stderr);
  run.finish({{"dt", a.dt}, {"warm_start_target", tc.warm_target}});
  std::printf("kappa_hat = %.5f +- %.5f", k.kappa_hat, k.kappa_stderr);
  if (oracles::has_known_kappa(a.beta)) std::printf(" (target %.5f)", oracles::known_kappa(a.beta));
  std::printf("\n");
  return 0;
}

// ---- sample-points ------------------------------------------------------------------
struct PointsArgs {
  Common c;
  double beta = 2.0;
  double lambda_max = 50.0;
  std::size_t resolution = 1000;
  std::uint64_t seed = 1;
  double dt = 0.0;
};

int cmd_sample_points(const PointsArgs& a) {
  Run run("sample-points", a.c,
          {{"beta", a.beta}, {"lambda-max", a.lambda_max}, {"resolution", a.resolution},
           {"seed", a.seed}, {"dt", a.dt}});
  sine::PhaseConfig pc;
  pc.dt = a.dt;
  const auto pts = sine::sample_sine_beta(a.lambda_max, a.beta, a.resolution, a.seed, pc);
  io::CsvTable csv({"index", "x"});
  for (std::size_t i = 0; i < pts.points.size(); ++i) {
    csv.add_row({std::to_string(i), io::format_double(pts.points[i])});
  }
  run.write("points.csv", csv.str());
  Json j = run.report("sample-points");
  j["points"] = pts.points;
  j["counts"] = pts.counts;
  j["cell_width"] = pts.cell_width;
  run.write("points.json", io::dump(j));
  std::vector<double> xs, ys, es;
  for (std::size_t i = 0; i < pts.counts.size(); ++i) {
    xs.push_back(pts.cell_width * static_cast<double>(i + 1));
    ys.push_back(static_cast<double>(pts.counts[i]));
    es.push_back(0.0);
  }
  run.plot("points.plot.txt", xs, ys, es);
  run.finish();
  std::printf("%zu points in [0, %g]\n", pts.points.size(), a.lambda_max);
  return 0;
}

// ---- oracle matrix | fredholm -------------------------------------------------------
struct MatrixArgs {
  Common c;
  double beta = 2.0;
  std::size_t n = 400;
  std::size_t samples = 2000;
  double lambda = 2.0;
  int k = 0;
  double mu = 0.0;
  std::uint64_t seed = 1;
};

int cmd_oracle_matrix(const MatrixArgs& a) {
  const ModelParams check(a.beta, a.lambda);
  if (a.k < 0) throw ConfigError("--k must be >= 0");
  Run run("oracle-matrix", a.c,
          {{"beta", a.beta}, {"n", a.n}, {"samples", a.samples}, {"lambda", a.lambda}, {"k", a.k},
           {"mu", a.mu}, {"seed", a.seed}});
  const auto s = oracles::bulk_window_samples(a.n, a.beta, a.mu, a.lambda, a.samples, a.seed,
                                              a.c.threads);
  const auto e = oracles::empirical_gap_prob(s, a.lambda, a.k, a.seed);
  io::CsvTable csv({"method", "beta", "lambda", "k", "value", "stderr", "n_samples", "seed"});
  csv.add_row({to_string(e.method), io::format_double(a.beta), io::format_double(a.lambda),
               std::to_string(a.k), io::format_double(e.value), io::format_double(e.stderr_),
               std::to_string(e.n_samples), std::to_string(e.seed)});
  run.write("oracle_matrix.csv", csv.str());
  Json j = run.report("oracle-matrix");
  j["estimate"] = estimate_row(e);
  run.write("oracle_matrix.json", io::dump(j));
  run.plot("oracle_matrix.plot.txt", {a.lambda}, {e.value}, {e.stderr_});
  run.finish();
  std::printf("E(%d; %g) = %.6f +- %.6f (matrix n = %zu)\n", a.k, a.lambda, e.value, e.stderr_, a.n);
  return 0;
}

struct FredholmArgs {
  Common c;
  double lambda = 2.0;
  int order = 60;
};

int cmd_oracle_fredholm(const FredholmArgs& a) {
  Run run("oracle-fredholm", a.c, {{"lambda", a.lambda}, {"order", a.order}});
  if (a.order < 2) throw ConfigError("--order must be >= 2");
  const double v = oracles::sine_kernel_gap(a.lambda, 0, a.order);
  GapEstimate e;
  e.value = v;
  e.method = Method::oracle_fredholm;
  io::CsvTable csv({"method", "beta", "lambda", "k", "value", "stderr", "n_samples", "seed"});
  csv.add_row({to_string(e.method), "2", io::format_double(a.lambda), "0", io::format_double(v),
               "0", "0", "0"});
  run.write("oracle_fredholm.csv", csv.str());
  Json j = run.report("oracle-fredholm");
  j["estimate"] = estimate_row(e);
  run.write("oracle_fredholm.json", io::dump(j));
  run.plot("oracle_fredholm.plot.txt", {a.lambda}, {v}, {0.0});
  run.finish();
  std::printf("%.15g\n", v);
  return 0;
}

// ---- validate -----------------------------------------------------------------------
struct ValidateArgs {
  Common c;
  bool quick = false;
  std::string criteria;
  std::uint64_t seed = 20'250'101;
};

int cmd_validate(const ValidateArgs& a, const std::string& self) {
  validate::ValidateConfig cfg;
  cfg.quick = a.quick;
  cfg.budget = a.quick ? validate::Budget::quick() : validate::Budget::full();
  cfg.threads = a.c.threads;
  cfg.seed = a.seed;
  if (!a.criteria.empty()) cfg.criteria = validate::parse_criteria(a.criteria);
  Json conf = {{"quick", a.quick}, {"criteria", a.criteria}, {"seed", a.seed}};
  Run run("validate", a.c, conf);
  cfg.cli_path = self;
  std::string dir = a.c.out;
  if (dir.empty()) {
    const char* env = std::getenv("CAROUSEL_OUT");
    dir = (env && *env) ? env : "out";
  }
  cfg.work_dir = (fs::path(dir) / "repro").string();
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = validate::run_validation(cfg, [](const validate::CriterionResult& r) {
    std::cout << validate::summary_line(r) << std::endl;
  });
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Json j = validate::numerical_json(rep, cfg);
  j["config"]["criteria"] = a.criteria;
  run.write("report.json", io::dump(j));
  run.write("checks.csv", validate::checks_csv(rep));
  run.finish(validate::manifest_json(rep, cfg, wall));
  std::cout << (rep.all_passed() ? "all criteria passed" : "some criteria failed") << "\n";
  return rep.all_passed() ? 0 : 1;
}

std::string self_path(const char* argv0) {
  std::error_code ec;
  const auto p = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) return p.string();
  return fs::absolute(argv0).string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo engine for Sine_beta gap probabilities"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();

  GapDirectArgs gd;
  auto* s_gd = app.add_subcommand("gap-direct", "E_beta(k; lambda) from the phase diffusion");
  add_common(s_gd, gd.c);
  s_gd->add_option("--beta", gd.beta);
  s_gd->add_option("--lambda", gd.lambda);
  s_gd->add_option("--k", gd.k);
  s_gd->add_option("--n", gd.n);
  s_gd->add_option("--seed", gd.seed);
  s_gd->add_option("--dt", gd.dt, "0 = min(1e-3, 0.1/lambda)");
  s_gd->add_option("--drift-tolerance", gd.drift_tolerance);

  GapIsArgs gi;
  auto* s_gi = app.add_subcommand("gap-is", "p_lambda by importance sampling of the tilted diffusion");
  add_common(s_gi, gi.c);
  s_gi->add_option("--beta", gi.beta);
  s_gi->add_option("--lambda", gi.lambda);
  s_gi->add_option("--n", gi.n);
  s_gi->add_option("--seed", gi.seed);
  s_gi->add_option("--table", gi.table, "P1 table JSON from p1-table");
  s_gi->add_option("--dt", gi.dt);
  s_gi->add_option("--preflight", gi.preflight, "paths in the G-equivalence check");

  P1Args pa;
  auto* s_p1 = app.add_subcommand("p1-table", "tabulate p_1(x)");
  add_common(s_p1, pa.c);
  s_p1->add_option("--beta", pa.beta);
  s_p1->add_option("--n-per-point", pa.n_per_point);
  s_p1->add_option("--seed", pa.seed);
  s_p1->add_option("--dt", pa.dt);
  s_p1->add_option("--tail-tolerance", pa.tail_tolerance);
  s_p1->add_option("--x-max", pa.x_max, "blow-up level");

  KappaArgs ka;
  auto* s_k = app.add_subcommand("kappa", "m(lambda) over a lambda list and kappa_hat");
  add_common(s_k, ka.c);
  s_k->add_option("--beta", ka.beta);
  s_k->add_option("--lambdas", ka.lambdas, "comma-separated, increasing");
  s_k->add_option("--n", ka.n);
  s_k->add_option("--seed", ka.seed);
  s_k->add_option("--table", ka.table, "P1 table JSON; built when absent");
  s_k->add_option("--table-n", ka.table_n);
  s_k->add_option("--dt", ka.dt);

  PointsArgs sp;
  auto* s_sp = app.add_subcommand("sample-points", "a Sine_beta configuration on [0, lambda-max]");
  add_common(s_sp, sp.c);
  s_sp->add_option("--beta", sp.beta);
  s_sp->add_option("--lambda-max", sp.lambda_max);
  s_sp->add_option("--resolution", sp.resolution);
  s_sp->add_option("--seed", sp.seed);
  s_sp->add_option("--dt", sp.dt);

  auto* s_or = app.add_subcommand("oracle", "reference values");
  s_or->require_subcommand(1);
  MatrixArgs ma;
  auto* s_om = s_or->add_subcommand("matrix", "gap probability from tridiagonal beta-ensembles");
  add_common(s_om, ma.c);
  s_om->add_option("--beta", ma.beta);
  s_om->add_option("--n", ma.n);
  s_om->add_option("--samples", ma.samples);
  s_om->add_option("--lambda", ma.lambda);
  s_om->add_option("--k", ma.k);
  s_om->add_option("--mu", ma.mu);
  s_om->add_option("--seed", ma.seed);
  FredholmArgs fa;
  auto* s_of = s_or->add_subcommand("fredholm", "det(I - K_sine) on [0, lambda]");
  add_common(s_of, fa.c);
  s_of->add_option("--lambda", fa.lambda);
  s_of->add_option("--order", fa.order);

  ValidateArgs va;
  auto* s_v = app.add_subcommand("validate", "run the acceptance suite");
  add_common(s_v, va.c);
  s_v->add_flag("--quick", va.quick, "reduced sample sizes");
  s_v->add_option("--criteria", va.criteria, "subset, e.g. 1,2,5-7");
  s_v->add_option("--seed", va.seed);

  try {
    const auto args = expand_config(argc, argv);
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e);
      return 0;
    }
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (s_gd->parsed()) return cmd_gap_direct(gd);
    if (s_gi->parsed()) return cmd_gap_is(gi);
    if (s_p1->parsed()) return cmd_p1_table(pa);
    if (s_k->parsed()) return cmd_kappa(ka);
    if (s_sp->parsed()) return cmd_sample_points(sp);
    if (s_om->parsed()) return cmd_oracle_matrix(ma);
    if (s_of->parsed()) return cmd_oracle_fredholm(fa);
    if (s_v->parsed()) return cmd_validate(va, self_path(argv[0]));
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const InvariantError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
