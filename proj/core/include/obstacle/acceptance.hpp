#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace obstacle {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  /// Measured quantities against their thresholds, '; '-separated.
  std::string detail;
  /// FNV-1a digest of every number the criterion produced (bitwise).
  std::uint64_t digest = 0;
  double seconds = 0.0;
};

/// Criterion ids 1..12.
std::vector<int> criterion_ids();

/// Runs one criterion. Criterion 12 runs 1..11 twice and compares digests.
CriterionResult run_criterion(int id);

/// Runs the selected criteria (all when empty) concurrently and returns them
/// in id order. When 12 is selected, the first-pass digests of 1..11 are
/// reused and only the second pass is recomputed.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids = {},
                                            unsigned threads = 0);

/// "PASS  3  title  [detail]  (1.2 s)"
std::string format_result(const CriterionResult& result);

}  // namespace obstacle
