#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hcran {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Oracle and invariant checks on desk-scale instances; a few seconds of work.
std::vector<CheckResult> verification_suite();

/// Runs the suite, prints one PASS/FAIL line per check, returns true when all pass.
bool run_verification(std::ostream& out);

}  // namespace hcran
