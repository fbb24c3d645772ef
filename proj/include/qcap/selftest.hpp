#pragma once

#include <string>
#include <vector>

namespace qcap {

struct SelfCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast invariant and closed-form suite behind `qcap selftest`.
std::vector<SelfCheck> run_selftest(unsigned seed = 0);

}  // namespace qcap
