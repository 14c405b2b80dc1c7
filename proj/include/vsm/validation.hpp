#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vsm/config.hpp"

namespace vsm {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;  ///< worst observed error (or violation measure)
  double limit = 0.0;
  std::string detail;
};

struct ValidationOptions {
  std::uint64_t seed = 20240917;
  int samples = 200;
  /// Test hook: added to every analytic Jacobian entry before comparison.
  double jacobian_perturbation = 0.0;
};

/// Runs the invariant checks on the designs and spring of `config`.
std::vector<CheckResult> run_validation(const RunConfig& config, const ValidationOptions& options = {});

}  // namespace vsm
