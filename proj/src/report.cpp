#include "hslg/report.hpp"

#include <cmath>
#include <fstream>

namespace hslg::lab {

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != header.size()) throw std::logic_error("table " + name + ": row width differs from header");
  rows.push_back(std::move(row));
}

std::string cell(double v) { return format_double(v); }
std::string cell(long long v) { return std::to_string(v); }
std::string cell(const std::string& v) { return v; }

stats::Verdict Report::overall() const {
  bool inconclusive = false;
  for (const auto& c : checks) {
    if (c.verdict == stats::Verdict::fail) return stats::Verdict::fail;
    inconclusive = inconclusive || c.verdict == stats::Verdict::inconclusive;
  }
  return inconclusive || checks.empty() ? stats::Verdict::inconclusive : stats::Verdict::pass;
}

namespace {

// JSON has no infinity; non-finite values become strings.
Json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? Json("nan") : Json(v > 0 ? "inf" : "-inf");
}

}  // namespace

Json to_json(const stats::KSReport& ks) {
  Json j;
  j["statistic"] = number(ks.statistic);
  j["n1"] = ks.n1;
  j["n2"] = ks.n2 ? Json(*ks.n2) : Json(nullptr);
  j["p_approx"] = ks.p_approx ? number(*ks.p_approx) : Json(nullptr);
  j["threshold_kind"] = ks.threshold.kind == stats::KSThreshold::Kind::level ? "level" : "max_statistic";
  j["threshold"] = number(ks.threshold.value);
  j["weighted"] = ks.weighted;
  j["verdict"] = std::string(stats::to_string(ks.verdict));
  return j;
}

Json to_json(const Report& report) {
  Json j;
  j["experiment"] = report.config.experiment;
  Json params = Json::object();
  for (const auto& [k, v] : report.config.values)
    if (k != "out" && k != "workers") params[k] = v;
  j["params"] = params;
  j["verdict"] = std::string(stats::to_string(report.overall()));
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    Json cj;
    cj["check"] = c.name;
    cj["verdict"] = std::string(stats::to_string(c.verdict));
    cj["detail"] = c.detail;
    checks.push_back(cj);
  }
  j["checks"] = checks;
  Json files = Json::array();
  for (const auto& t : report.tables) files.push_back(t.name + ".csv");
  j["tables"] = files;
  return j;
}

void write_report(const Report& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << text;
    if (!os) throw IoError("write failed for " + path.string());
  };
  write(dir / "report.json", to_json(report).dump(2) + "\n");
  for (const auto& t : report.tables) {
    std::string text;
    for (std::size_t i = 0; i < t.header.size(); ++i) text += (i ? "," : "") + t.header[i];
    text += "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + row[i];
      text += "\n";
    }
    write(dir / (t.name + ".csv"), text);
  }
}

int exit_status(stats::Verdict v) {
  switch (v) {
    case stats::Verdict::pass:
      return 0;
    case stats::Verdict::fail:
      return 1;
    default:
      return 2;
  }
}

}  // namespace hslg::lab
