// Acceptance gate: one pass/fail line per criterion. Exit code is the
// number of failed criteria. `--only K` runs a single criterion (the ctest
// harness fans out over all twelve); `--quick` runs the fast subset.
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "bdising/validate.hpp"

int main(int argc, char** argv) {
  std::vector<int> only;
  bool quick = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only.push_back(std::atoi(argv[++i]));
    } else if (std::strcmp(argv[i], "--quick") == 0) {
      quick = true;
    } else {
      std::fprintf(stderr, "usage: %s [--only K]... [--quick]\n", argv[0]);
      return 64;
    }
  }
  int failed = 0;
  for (const bdising::CriterionResult& r : bdising::run_acceptance(only, quick)) {
    std::printf("criterion %2d %-20s %s  %s  [%.1f s]\n", r.id, r.name.c_str(),
                r.passed ? "PASS" : "FAIL", r.detail.c_str(), r.seconds);
    std::fflush(stdout);
    if (!r.passed) ++failed;
  }
  return failed;
}
