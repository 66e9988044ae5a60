// obstacle-bench: batch driver for the obstacle-problem experiments.
//
//   obstacle-bench run <config>
//   obstacle-bench sweep <config> --param numeric.h --values 1/64,1/128
//   obstacle-bench accept [--only 3 --only 5] [--threads N]
//
// Exit codes: 0 ok, 1 error (parse, I/O, failed acceptance), 2 violated
// hypothesis, 3 solver flagged non-convergence.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "obstacle/acceptance.hpp"
#include "obstacle/config.hpp"
#include "obstacle/errors.hpp"
#include "obstacle/experiment.hpp"

namespace {

std::vector<std::string> split_values(const std::string& text) {
  std::vector<std::string> out;
  if (text.find_first_not_of(" \t") == std::string::npos) return out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(',', start);
    out.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

int cmd_run(const std::string& path) {
  const obstacle::ExperimentConfig config = obstacle::parse_config_file(path);
  const obstacle::RunResult result = obstacle::run(config);
  std::cout << obstacle::to_csv(result.summary);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  std::cerr << result.message << " -> " << result.directory.string() << '\n';
  return result.exit_code;
}

int cmd_sweep(const std::string& path, const std::string& param, const std::string& values) {
  const obstacle::ExperimentConfig config = obstacle::parse_config_file(path);
  const obstacle::SweepResult result = obstacle::sweep(config, param, split_values(values));
  std::cout << result.csv;
  std::cerr << result.message << " -> " << result.file.string() << '\n';
  return result.exit_code;
}

int cmd_accept(const std::vector<int>& only, unsigned threads) {
  bool all = true;
  for (const auto& r : obstacle::run_acceptance(only, threads)) {
    std::cout << obstacle::format_result(r) << '\n';
    all = all && r.passed;
  }
  return all ? obstacle::kExitOk : obstacle::kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Obstacle-problem numerical experiments"};
  app.set_version_flag("--version", std::string(obstacle::version()));
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run one experiment config");
  run->add_option("config", config_path, "Config file")->required();

  std::string param, values;
  auto* sweep = app.add_subcommand("sweep", "Sweep one numeric key over a list of values");
  sweep->add_option("config", config_path, "Config file")->required();
  sweep->add_option("--param", param, "Numeric config key, e.g. numeric.h")->required();
  sweep->add_option("--values", values, "Comma-separated values (fractions allowed)")
      ->required()
      ->expected(0, 1);

  std::vector<int> only;
  unsigned threads = 0;
  auto* accept = app.add_subcommand("accept", "Run the acceptance suite");
  accept->add_option("--only", only, "Criterion id (repeatable)");
  accept->add_option("--threads", threads, "Worker threads (0 = hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? obstacle::kExitOk : obstacle::kExitError;
  }

  try {
    if (*run) return cmd_run(config_path);
    if (*sweep) return cmd_sweep(config_path, param, values);
    if (*accept) return cmd_accept(only, threads);
  } catch (const obstacle::HypothesisError& e) {
    std::cerr << "hypothesis violated: " << e.what() << '\n';
    return obstacle::kExitHypothesis;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return obstacle::kExitError;
  }
  return obstacle::kExitError;
}
