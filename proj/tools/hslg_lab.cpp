#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hslg/errors.hpp"
#include "hslg/experiments.hpp"

using namespace hslg::lab;

namespace {

constexpr int kExitRuntime = 5;

// Turns leftover `--key value` / `--key=value` arguments into parameters.
void apply_flag_overrides(ExperimentConfig& config, const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const auto& arg = extras[i];
    if (arg.rfind("--", 0) != 0 || arg.size() < 3) throw UsageError("unexpected argument '" + arg + "'");
    const auto eq = arg.find('=');
    if (eq != std::string::npos) {
      config.set(arg.substr(2, eq - 2), arg.substr(eq + 1));
    } else {
      if (i + 1 >= extras.size()) throw UsageError("flag '" + arg + "' needs a value");
      config.set(arg.substr(2), extras[++i]);
    }
  }
}

// HSLG_<key> overrides for every parameter of the experiment; keys are case-sensitive.
void apply_env_overrides(ExperimentConfig& config) {
  for (const auto& [key, value] : find_experiment(config.experiment).defaults) {
    (void)value;
    if (const char* env = std::getenv(("HSLG_" + key).c_str())) config.set(key, std::string(env));
  }
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ExperimentConfig::parse(ss.str(), path);
}

struct Common {
  std::string seed, workers, out;

  void add_to(CLI::App* app) {
    app->add_option("--seed", seed, "random seed (unsigned 64-bit)");
    app->add_option("--workers", workers, "OpenMP worker threads, 0 = runtime default");
    app->add_option("--out", out, "output directory for report.json and CSVs");
  }
  void apply(ExperimentConfig& config) const {
    if (!seed.empty()) config.set("seed", seed);
    if (!workers.empty()) config.set("workers", workers);
    if (!out.empty()) config.set("out", out);
  }
};

int execute_and_report(const ExperimentConfig& partial) {
  const auto resolved = resolve(partial);
  const int status = run(resolved);
  std::cout << resolved.experiment << ": " << (status == 0 ? "pass" : status == 1 ? "fail" : "inconclusive")
            << " (report in " << resolved.get("out") << "/report.json)\n";
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HSLG polymer and line-ensemble verification lab"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "list experiments");

  std::string defaults_name;
  auto* defaults = app.add_subcommand("defaults", "print the default config of an experiment");
  defaults->add_option("experiment", defaults_name)->required();

  std::string experiment;
  Common verify_common;
  auto* verify = app.add_subcommand("verify", "run an experiment; further --key value flags set parameters");
  verify->add_option("experiment", experiment)->required();
  verify_common.add_to(verify);
  verify->allow_extras();

  std::string config_path;
  Common run_common;
  auto* run_cmd = app.add_subcommand("run", "run the experiment described by a config file");
  run_cmd->add_option("--config", config_path, "key = value config file")->required();
  run_common.add_to(run_cmd);
  run_cmd->allow_extras();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (list->parsed()) {
      for (const auto& e : registry()) std::cout << e.name << "  " << e.summary << "\n";
      return 0;
    }
    if (defaults->parsed()) {
      std::cout << default_config(defaults_name).serialize();
      return 0;
    }
    if (verify->parsed()) {
      ExperimentConfig config{experiment, {}};
      find_experiment(experiment);
      apply_env_overrides(config);
      apply_flag_overrides(config, verify->remaining());
      verify_common.apply(config);
      return execute_and_report(config);
    }
    auto config = load_config_file(config_path);
    find_experiment(config.experiment);
    apply_env_overrides(config);
    apply_flag_overrides(config, run_cmd->remaining());
    run_common.apply(config);
    return execute_and_report(config);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const hslg::DomainError& e) {
    std::cerr << "invalid parameter: " << e.what() << "\n";
    return kExitUsage;
  } catch (const hslg::ContractError& e) {
    std::cerr << "invalid parameter: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
