#pragma once

#include "conlearn/types.hpp"

namespace conlearn {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Vector x;
  Scalar objective = 0.0;
};

/// Dense two-phase primal simplex for min c^T x s.t. A x = b, x >= 0.
/// Bland's rule throughout, so the method terminates on degenerate instances.
/// Returns a vertex (basic) solution: at most rows(A) nonzero entries.
LpSolution solve_lp(const Matrix& A, const Vector& b, const Vector& c);

}  // namespace conlearn
