#pragma once

#include <string>
#include <vector>

namespace tailsplit {

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

// Fast built-in identities: transform normalizations, the ratio variance
// identity, correlation consistency, q integral identity, incomplete gamma
// recurrence and a few closed-form spot values.
std::vector<CheckResult> run_identity_suite();

}  // namespace tailsplit
