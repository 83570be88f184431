#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hslg::lab {

/// Malformed configuration text or a bad parameter value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Experiment name plus a flat map of parameters, all stored as text.
///
/// The text form is one `key = value` per line, `#` starts a comment, and
/// the experiment is named by the `experiment` key. serialize() writes keys
/// in sorted order with doubles at round-trip precision, so
/// parse(serialize(c)) == c.
struct ExperimentConfig {
  std::string experiment;
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  /// Comma-separated doubles.
  std::vector<double> get_list(const std::string& key) const;

  void set(const std::string& key, std::string value);
  void set(const std::string& key, double value);

  std::string serialize() const;
  static ExperimentConfig parse(std::string_view text, const std::string& origin = "config");

  bool operator==(const ExperimentConfig&) const = default;
};

/// Shortest text that reads back as exactly `value`.
std::string format_double(double value);

}  // namespace hslg::lab
