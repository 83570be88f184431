#include "hslg/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace hslg::lab {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& text) {
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw ConfigError("parameter '" + key + "': expected a number, got '" + text + "'");
  return v;
}

}  // namespace

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  if (value == std::floor(value) && std::abs(value) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", value);
    return buf;
  }
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

const std::string& ExperimentConfig::get(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) throw ConfigError("missing parameter '" + key + "'");
  return it->second;
}

double ExperimentConfig::get_double(const std::string& key) const { return parse_double(key, get(key)); }

long long ExperimentConfig::get_int(const std::string& key) const {
  const double v = get_double(key);
  if (v != std::floor(v) || std::abs(v) > 9.0e15)
    throw ConfigError("parameter '" + key + "': expected an integer, got '" + get(key) + "'");
  return static_cast<long long>(v);
}

std::uint64_t ExperimentConfig::get_u64(const std::string& key) const {
  const auto& text = get(key);
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw ConfigError("parameter '" + key + "': expected an unsigned integer, got '" + text + "'");
  return v;
}

std::vector<double> ExperimentConfig::get_list(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(get(key));
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw ConfigError("parameter '" + key + "': empty list");
  return out;
}

void ExperimentConfig::set(const std::string& key, std::string value) {
  if (key.empty() || key.find_first_of(" \t=#\n") != std::string::npos)
    throw ConfigError("invalid parameter name '" + key + "'");
  if (value.find('\n') != std::string::npos) throw ConfigError("parameter '" + key + "': value contains a newline");
  if (key == "experiment") {
    experiment = trim(value);
    return;
  }
  values[key] = trim(value);
}

void ExperimentConfig::set(const std::string& key, double value) { set(key, format_double(value)); }

std::string ExperimentConfig::serialize() const {
  std::string out = "experiment = " + experiment + "\n";
  for (const auto& [k, v] : values) out += k + " = " + v + "\n";
  return out;
}

ExperimentConfig ExperimentConfig::parse(std::string_view text, const std::string& origin) {
  ExperimentConfig out;
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    const auto raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    auto line = raw.substr(0, raw.find('#'));
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto where = origin + ":" + std::to_string(line_no) + ": ";
    if (out.has(key) || (key == "experiment" && !out.experiment.empty()))
      throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      out.set(key, trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  if (out.experiment.empty()) throw ConfigError(origin + ": no 'experiment = ...' line");
  return out;
}

}  // namespace hslg::lab
