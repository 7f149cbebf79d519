#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qkg::cli {

struct CheckResult {
  std::string name;  ///< module.invariant
  bool passed = false;
  std::string detail;
};

/// Fast invariant suite with fixed internal seeds.
std::vector<CheckResult> run_selftest();

/// Prints one line per check and returns 0 iff every check passed.
int cmd_selftest(std::ostream& out);

}  // namespace qkg::cli
