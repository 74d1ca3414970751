#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace hierprox {

// One record per iteration. Fields that a driver cannot compute stay NaN.
struct IterRecord {
  std::size_t iter = 0;
  double iterate_norm = std::numeric_limits<double>::quiet_NaN();
  double fp_residual = std::numeric_limits<double>::quiet_NaN();
  double psi_value = std::numeric_limits<double>::quiet_NaN();
  double objective = std::numeric_limits<double>::quiet_NaN();
  double distance = std::numeric_limits<double>::quiet_NaN();
};

using IterTrace = std::vector<IterRecord>;

}  // namespace hierprox
