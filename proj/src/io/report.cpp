#include "carousel/io/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "carousel/errors.hpp"

namespace carousel::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw InvariantError("CSV row width does not match header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::ostringstream out;
  out << "schema_version";
  for (const auto& h : header_) out << ',' << h;
  out << '\n';
  for (const auto& r : rows_) {
    out << kSchemaVersion;
    for (const auto& c : r) out << ',' << c;
    out << '\n';
  }
  return out.str();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const GapEstimate& e) {
  Json j;
  j["value"] = e.value;
  j["stderr"] = e.stderr_;
  j["n_samples"] = e.n_samples;
  j["method"] = to_string(e.method);
  j["seed"] = e.seed;
  return j;
}

std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name,
                                 const std::string& content) {
  if (name.empty() || name.find('/') != std::string::npos || name.find('\\') != std::string::npos ||
      name == "." || name == "..") {
    throw ConfigError("output name must be a plain file name: " + name);
  }
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
  return path;
}

std::string plot_data(const std::vector<double>& x, const std::vector<double>& y,
                      const std::vector<double>& yerr) {
  if (x.size() != y.size() || x.size() != yerr.size()) {
    throw InvariantError("plot data columns differ in length");
  }
  std::ostringstream out;
  out << "x,y,yerr\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    out << format_double(x[i]) << ',' << format_double(y[i]) << ',' << format_double(yerr[i]) << '\n';
  }
  return out.str();
}

}  // namespace carousel::io
