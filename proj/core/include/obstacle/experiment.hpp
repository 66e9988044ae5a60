#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "obstacle/config.hpp"
#include "obstacle/geometry.hpp"

namespace obstacle {

std::string_view version();

/// Exit-status contract of the experiment driver.
enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,
  kExitHypothesis = 2,
  kExitNotConverged = 3,
};

/// Environment variable naming the root under which relative output
/// directories are created.
inline constexpr const char* kOutputRootVariable = "OBSTACLE_OUTPUT_ROOT";

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Comma-separated rendering with a header line.
std::string to_csv(const Table& table);

DomainSpec make_domain(const ExperimentConfig& config);
Obstacle make_obstacle(const ExperimentConfig& config);

/// Output directory: config.output_dir, resolved against $OBSTACLE_OUTPUT_ROOT
/// when relative and the variable is set.
std::filesystem::path output_directory(const ExperimentConfig& config);

struct RunResult {
  int exit_code = kExitOk;
  std::filesystem::path directory;
  std::vector<std::filesystem::path> files;
  std::string message;
  std::vector<std::string> warnings;
  /// Per-kind summary (the rows a sweep collects).
  Table summary;
};

/// Runs one experiment, writing its CSV files and manifest.json into the
/// output directory. Library errors are mapped onto exit codes, never thrown.
RunResult run(const ExperimentConfig& config);

/// Computes the per-kind summary without writing anything. Throws on errors.
Table summarize(const ExperimentConfig& config, bool* converged = nullptr);

/// Header of the per-kind summary table.
std::vector<std::string> summary_header(const std::string& kind);

struct SweepResult {
  int exit_code = kExitOk;
  std::string csv;
  std::filesystem::path file;
  std::string message;
};

/// One summary block per value of `parameter` (rows prefixed with the value),
/// in input order; rows are computed concurrently. An empty value list yields
/// the header alone. Throws ParseError when `parameter` is not a numeric key.
SweepResult sweep(const ExperimentConfig& config, const std::string& parameter,
                  const std::vector<std::string>& values);

}  // namespace obstacle
