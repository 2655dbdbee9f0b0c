#pragma once

// Runtime invariant checks over every module, used by `chaos_ns validate`.

#include <cstdint>
#include <string>
#include <vector>

namespace chaos_ns {

struct InvariantResult {
  std::string module;
  std::string name;
  bool passed = false;
  double measured = 0.0;   // worst violation found (NaN when the check threw)
  double tolerance = 0.0;
  std::string detail;      // exception text, if any
};

struct SuiteOptions {
  int workers = 1;
  std::uint64_t seed = 20240611;
};

/// Runs every check in a fixed order; never throws on a failing check.
std::vector<InvariantResult> run_invariant_suite(const SuiteOptions& options = {});

}  // namespace chaos_ns
