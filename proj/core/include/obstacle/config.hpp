#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace obstacle {

/// Experiment description read from a line-oriented `section.key = value`
/// file. Blank lines and lines starting with '#' are ignored; lists are
/// comma-separated; numbers may be written as fractions ("1/128").
struct ExperimentConfig {
  std::string kind;
  std::string name = "experiment";
  std::uint64_t seed = 42;
  unsigned threads = 0;
  std::string output_dir = "out";

  std::string domain_kind = "ball";
  std::vector<double> domain_params{1.0};

  std::string obstacle_kind = "cap";
  std::vector<double> obstacle_params{1.0, 8.0};
  int dimension = 2;

  double h = 1.0 / 128.0;
  double tol = 1e-10;
  /// 0 selects the optimal box relaxation.
  double omega = 0.0;
  long max_sweeps = 200000;
  /// 0 selects h^2 * max|psi|.
  double ctol = 0.0;
  std::vector<double> epsilons{0.1, 0.05, 0.025};
  int flux_samples = 512;
  int vi_trials = 100;

  double radial_radius = 1.0;
  double dirichlet_value = 0.0;
  std::vector<double> radial_radii;

  std::optional<double> c_override;
  bool flux_budget = false;
  std::vector<double> amplitudes{0.02, 0.05, 0.1};

  double sigma_plus = 2.0;
  double sigma_minus = 1.0;
  double outer_radius = 2.0;
  std::string d_mode = "minimax";
  int interface_samples = 512;
  bool penalize = false;

  int directions = 8;
  double direction_offset = 0.0;

  double interface_radius = 1.0;
  std::vector<double> schedule{4.0, 8.0, 16.0};

  double calibrate_radius = 1.0;

  /// Assignments in file order, echoed into the run manifest.
  std::vector<std::pair<std::string, std::string>> entries;
};

/// Experiment kinds accepted by `experiment.kind`.
const std::vector<std::string>& experiment_kinds();

/// All recognised keys, in documentation order.
std::vector<std::string> config_keys();

/// True for keys whose value is a number or a list of numbers.
bool is_numeric_key(const std::string& key);

/// Assigns one key. Throws ParseError (with `line`) for unknown keys and for
/// values that do not parse or fall outside the documented range.
void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value,
                      int line = 0);

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

/// Parses "1/128", "0.5", "1e-3".
double parse_number(const std::string& text);

}  // namespace obstacle
