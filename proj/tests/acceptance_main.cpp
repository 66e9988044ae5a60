// Acceptance suite: one PASS/FAIL line per criterion.
//
//   obstacle_acceptance [--only N]... [--threads T]
//
// Exits 0 only when every selected criterion passes.

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <vector>

#include "obstacle/acceptance.hpp"

int main(int argc, char** argv) {
  std::vector<int> only;
  unsigned threads = 0;
  for (int k = 1; k < argc; ++k) {
    if (std::strcmp(argv[k], "--only") == 0 && k + 1 < argc) {
      only.push_back(std::atoi(argv[++k]));
    } else if (std::strcmp(argv[k], "--threads") == 0 && k + 1 < argc) {
      threads = static_cast<unsigned>(std::atoi(argv[++k]));
    } else {
      std::cerr << "usage: " << argv[0] << " [--only N]... [--threads T]\n";
      return 1;
    }
  }
  try {
    bool all = true;
    for (const auto& r : obstacle::run_acceptance(only, threads)) {
      std::cout << obstacle::format_result(r) << std::endl;
      all = all && r.passed;
    }
    return all ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
