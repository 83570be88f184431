#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hslg/config.hpp"
#include "hslg/report.hpp"

namespace hslg::lab {

/// Unknown experiment or parameter.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exit status for usage and configuration errors.
inline constexpr int kExitUsage = 3;
/// Exit status for file-system failures.
inline constexpr int kExitIo = 4;

struct ExperimentInfo {
  std::string name;
  std::string summary;
  std::map<std::string, std::string> defaults;  // includes seed, workers and out
};

const std::vector<ExperimentInfo>& registry();
/// Throws UsageError naming the known experiments.
const ExperimentInfo& find_experiment(const std::string& name);

/// Every parameter of the experiment at its default.
ExperimentConfig default_config(const std::string& name);

/// Defaults overlaid with the given values; throws UsageError on a key the
/// experiment does not know.
ExperimentConfig resolve(const ExperimentConfig& config);

/// Runs a resolved configuration and returns its report without writing
/// anything. Sets the worker count from `workers` (0 keeps the default).
Report execute(const ExperimentConfig& config);

/// resolve, execute, write the report under `out`, and return 0 (pass),
/// 1 (fail) or 2 (inconclusive). Errors propagate as exceptions.
int run(const ExperimentConfig& config);

}  // namespace hslg::lab
