#pragma once

#include <string>
#include <vector>

namespace nsdecay {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast invariant suite: closed-form norm oracles, sphere identities, exact Fourier
/// identities, moment-expansion bounds, window additivity and configuration round trip.
std::vector<CheckResult> run_selfchecks();

}  // namespace nsdecay
