#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hslg/config.hpp"
#include "hslg/stats.hpp"

namespace hslg::lab {

using Json = nlohmann::ordered_json;

/// Writing report files failed; the message names the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One named verdict with its numbers.
struct Check {
  std::string name;
  stats::Verdict verdict = stats::Verdict::inconclusive;
  Json detail = Json::object();
};

/// Plot-ready table written as <name>.csv.
struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
};

std::string cell(double v);
std::string cell(long long v);
std::string cell(const std::string& v);

struct Report {
  ExperimentConfig config;  // fully resolved parameters
  std::vector<Check> checks;
  std::vector<Table> tables;

  /// fail if any check fails, else inconclusive if any is, else pass.
  stats::Verdict overall() const;
};

Json to_json(const stats::KSReport& ks);
/// Deterministic report: no timestamps, fixed key order. `out` and `workers`
/// are left out of the parameter record since they cannot change results.
Json to_json(const Report& report);

/// Writes report.json and every table into dir (created if needed).
void write_report(const Report& report, const std::filesystem::path& dir);

/// 0 pass, 1 fail, 2 inconclusive.
int exit_status(stats::Verdict v);

}  // namespace hslg::lab
