#pragma once

#include "conlearn/model.hpp"
#include "conlearn/scaling.hpp"

#include <cstdint>
#include <vector>

namespace conlearn {

/// Monte Carlo design for the width-scaling experiments. Inputs are drawn on
/// the unit sphere with a uniform radius in [0.5, 1] (bounded density away
/// from hyperplanes, no mass at 0); weight perturbations take a uniform random
/// direction at full radius D, the boundary of the search ball.
struct ScalingExperiment {
  std::vector<Index> m_grid;
  std::vector<Scalar> D_grid;
  Index d = 16;
  Index replicates = 2000;
  std::uint64_t seed = 0;
};

Vector sample_input(Rng& rng, Index d);

struct BoundCell {
  Index m = 0;
  Scalar mean_abs = 0.0;   // E |y(theta0; x)|
  Scalar stderr_abs = 0.0;
  Scalar p_exceed = 0.0;   // P(|y| > threshold)
  Scalar stderr_p = 0.0;
};

/// Monte Carlo estimate of E|y(theta0; x)| per width, fresh net and input per
/// replicate, plus the tail estimate at the given threshold.
std::vector<BoundCell> estimate_output_bound(const std::vector<Index>& m_grid,
                                             Index d, Index replicates,
                                             Scalar threshold,
                                             std::uint64_t seed);

struct LinearizationCell {
  Index m = 0;
  Scalar D = 0.0;
  Scalar mean_sq_dy = 0.0;       // E |y - y0|^2
  Scalar stderr_sq_dy = 0.0;
  Scalar mean_abs_dy = 0.0;      // E |y - y0|
  Scalar stderr_abs_dy = 0.0;
  Scalar mean_grad_diff = 0.0;   // E ||grad y - grad y0||
  Scalar stderr_grad_diff = 0.0;
  std::vector<Scalar> sq_samples;    // retained for bootstrap fits
  std::vector<Scalar> grad_samples;
};

std::vector<LinearizationCell> estimate_linearization_errors(
    const ScalingExperiment& exp);

/// Per-sample deterministic inequality behind the width analysis:
/// |y - y0| <= (2/sqrt(m)) sum_i 1{|(a_i^0)^T x| <= ||a_i - a_i^0||} ||a_i - a_i^0||.
/// Returns (|y - y0|, right-hand side).
std::pair<Scalar, Scalar> linearization_bound_sides(const TwoLayerNet& net,
                                                    const VecRef& x);

}  // namespace conlearn
