#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "carousel/estimate.hpp"

namespace carousel::io {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

/// %.17g, so every double round-trips; nan and inf spelled out.
std::string format_double(double v);

/// A CSV table whose first column is schema_version.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> cells);
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Renders JSON with a trailing newline; doubles keep full precision.
std::string dump(const Json& j);

Json to_json(const GapEstimate& e);

/// Writes `content` to dir/name. name must be a plain file name, so nothing is written
/// outside dir. Creates dir if needed.
std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name,
                                 const std::string& content);

/// (x, y, yerr) triples for external plotting.
std::string plot_data(const std::vector<double>& x, const std::vector<double>& y,
                      const std::vector<double>& yerr);

}  // namespace carousel::io
