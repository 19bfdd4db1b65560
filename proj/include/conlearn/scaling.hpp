#pragma once

#include "conlearn/types.hpp"

#include <cstdint>
#include <vector>

namespace conlearn {

struct ScalingFit {
  Scalar slope = 0.0;
  Scalar intercept = 0.0;  // of log(value) vs log(grid)
  Scalar stderr_slope = 0.0;
};

/// OLS of log(mean) on log(grid). Throws for fewer than 3 points or a
/// non-positive mean (the error names the offending cell).
ScalingFit fit_scaling_exponent(const std::vector<Scalar>& grid,
                                const std::vector<Scalar>& means);

/// Same fit with the slope standard error from a nonparametric bootstrap over
/// the per-cell replicate samples.
ScalingFit fit_scaling_exponent_bootstrap(
    const std::vector<Scalar>& grid,
    const std::vector<std::vector<Scalar>>& samples_per_cell, int bootstrap,
    std::uint64_t seed);

}  // namespace conlearn
