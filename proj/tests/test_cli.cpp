#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = CAROUSEL_TEST_WORK;

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" CAROUSEL_CLI "' " + args +
                          " > /dev/null 2> '" + (kWork / "stderr.txt").string() + "'";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path fresh(const std::string& name) {
  const auto d = kWork / name;
  fs::remove_all(d);
  return d;
}

std::string out(const fs::path& d) { return " --out '" + d.string() + "'"; }

}  // namespace

TEST_CASE("gap-direct") {
  fs::create_directories(kWork);
  const auto a = fresh("gd_a"), b = fresh("gd_b");
  const std::string args = "gap-direct --beta 2 --lambda 2 --k 0 --n 2000 --seed 1";
  REQUIRE(run(args + out(a)) == 0);
  REQUIRE(run(args + out(b) + " --threads 1") == 0);
  const auto csv = slurp(a / "gap_direct.csv");
  CHECK(csv.find("direct") != std::string::npos);
  CHECK(csv == slurp(b / "gap_direct.csv"));
  CHECK(slurp(a / "gap_direct.json") == slurp(b / "gap_direct.json"));
  const auto j = nlohmann::json::parse(slurp(a / "gap_direct.json"));
  CHECK(j["schema_version"] == 1);
  CHECK(fs::exists(a / "manifest.json"));
  CHECK(fs::exists(a / "gap-direct.config"));

  CHECK(run("gap-direct --lambda -1" + out(fresh("gd_bad"))) == 2);
  CHECK(slurp(kWork / "stderr.txt").find("lambda") != std::string::npos);
  CHECK(run("gap-direct --no-such-flag 3") == 2);
}

TEST_CASE("embedded config reproduces the run") {
  const auto a = fresh("cfg_a"), b = fresh("cfg_b");
  REQUIRE(run("gap-direct --beta 4 --lambda 1.5 --k 1 --n 1000 --seed 9" + out(a)) == 0);
  REQUIRE(run("gap-direct --config '" + (a / "gap-direct.config").string() + "'" + out(b)) == 0);
  CHECK(slurp(a / "gap_direct.csv") == slurp(b / "gap_direct.csv"));
  CHECK(slurp(a / "gap_direct.json") == slurp(b / "gap_direct.json"));
}

TEST_CASE("config precedence and output override") {
  const auto cfg = kWork / "prec.config";
  std::ofstream(cfg) << "# comment\nbeta = 2\nlambda = 3\n\nn = 500\nseed = 4\n";
  const auto a = fresh("prec_a");
  REQUIRE(run("gap-direct --config '" + cfg.string() + "' --lambda 1" + out(a)) == 0);
  const auto j = nlohmann::json::parse(slurp(a / "gap_direct.json"));
  CHECK(j["config"]["lambda"] == 1.0);
  CHECK(j["config"]["n"] == 500);

  const auto e = fresh("env_out");
  REQUIRE(run("gap-direct --n 200", "CAROUSEL_OUT='" + e.string() + "'") == 0);
  CHECK(fs::exists(e / "gap_direct.csv"));

  std::ofstream(kWork / "broken.config") << "beta 2\n";
  CHECK(run("gap-direct --config '" + (kWork / "broken.config").string() + "'" + out(fresh("x"))) == 2);
}

TEST_CASE("p1-table, gap-is and kappa") {
  const auto t = fresh("p1");
  REQUIRE(run("p1-table --beta 2 --n-per-point 40 --seed 3" + out(t)) == 0);
  const auto table = (t / "p1_table.json").string();
  CHECK(fs::exists(t / "p1_table.csv"));

  const auto a = fresh("is_a"), b = fresh("is_b");
  const std::string args = "gap-is --beta 2 --lambda 4 --n 300 --seed 2 --preflight 20 --table '" + table + "'";
  REQUIRE(run(args + out(a)) == 0);
  REQUIRE(run(args + out(b) + " --threads 1") == 0);
  CHECK(slurp(a / "gap_is.csv") == slurp(b / "gap_is.csv"));
  CHECK(slurp(a / "gap_is.csv").find("importance") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(a / "gap_is.json"));
  CHECK(j.contains("g_equivalence_rms"));

  CHECK(run("gap-is --beta 2 --lambda 4 --n 10 --table '" + (kWork / "missing.json").string() + "'" + out(fresh("is_c"))) == 2);
  CHECK(run("gap-is --beta 1 --lambda 4 --n 10 --table '" + table + "'" + out(fresh("is_d"))) == 2);
  CHECK(run("gap-is --beta 2 --lambda 4 --n 10" + out(fresh("is_e"))) == 2);

  const auto k = fresh("kappa");
  REQUIRE(run("kappa --beta 2 --lambdas 8,16,32,64 --n 40 --table '" + table + "'" + out(k)) == 0);
  const auto kj = nlohmann::json::parse(slurp(k / "kappa.json"));
  CHECK(std::abs(kj["target"].get<double>() - 0.91222) < 1e-4);
  CHECK(kj["m"].size() == 4);
  CHECK(run("kappa --beta 2 --lambdas 8,16 --n 10 --table '" + table + "'" + out(fresh("kappa_bad"))) == 2);
}

TEST_CASE("oracles and sampling") {
  const auto f = fresh("fred");
  REQUIRE(run("oracle fredholm --lambda 0" + out(f)) == 0);
  const auto fj = nlohmann::json::parse(slurp(f / "oracle_fredholm.json"));
  CHECK(fj["estimate"]["value"] == 1.0);

  const auto m = fresh("matrix");
  REQUIRE(run("oracle matrix --beta 2 --n 50 --samples 200 --lambda 2 --seed 1" + out(m)) == 0);
  CHECK(slurp(m / "oracle_matrix.csv").find("oracle-matrix") != std::string::npos);
  CHECK(run("oracle matrix --beta 2 --n 50 --samples 10 --lambda 2" + out(fresh("matrix_bad"))) == 2);

  const auto s = fresh("points");
  REQUIRE(run("sample-points --beta 2 --lambda-max 20 --seed 5" + out(s)) == 0);
  CHECK(fs::exists(s / "points.csv"));
  CHECK(run("sample-points --beta 0 --lambda-max 20" + out(fresh("points_bad"))) == 2);
}

TEST_CASE("emit plot data") {
  const auto d = fresh("plot");
  REQUIRE(run("gap-direct --n 200 --emit-plot-data" + out(d)) == 0);
  bool any = false;
  for (const auto& e : fs::directory_iterator(d)) any |= e.path().string().ends_with(".plot.txt");
  CHECK(any);
}

TEST_CASE("validate subset") {
  const auto d = fresh("validate");
  const int code = run("validate --quick --criteria 5" + out(d));
  CHECK((code == 0 || code == 1));
  const auto rep = nlohmann::json::parse(slurp(d / "report.json"));
  CHECK(rep["criteria"].size() == 1);
  CHECK(fs::exists(d / "checks.csv"));
  CHECK(fs::exists(d / "manifest.json"));
  CHECK(run("validate --criteria 12" + out(fresh("validate_bad"))) == 2);
}
