#pragma once

#include "conlearn/problem.hpp"
#include "conlearn/simplex.hpp"
#include "conlearn/types.hpp"

#include <string>
#include <vector>

namespace conlearn {

/// Snapshot-compression LP data: minimize c0^T p over the T-simplex subject to
/// c_j^T p <= epsilon. c0 holds per-snapshot objectives, c_j the per-snapshot
/// outer-constraint values g_j(r(theta^t)).
struct ShrinkInstance {
  Vector c0;
  Matrix cj;        // J x T
  Scalar epsilon = 0.0;

  Index num_snapshots() const { return c0.size(); }
  Index num_constraints() const { return cj.rows(); }
};

struct ShrinkResult {
  bool feasible = false;
  Vector p;          // simplex vector, nnz <= J+1
  Scalar objective = 0.0;
  Index nnz = 0;
  Index most_violated = -1;      // on infeasible: argmax_j min_p (c_j^T p - eps)
  Scalar violation = 0.0;
  std::string message;
};

/// epsilon that keeps the uniform mixture feasible: max_j max(0, c_j^T u).
Scalar default_shrink_epsilon(const ShrinkInstance& instance);

/// Solves the LP with the dense two-phase simplex. The returned vertex has at
/// most J+1 nonzero components.
ShrinkResult shrink(const ShrinkInstance& instance);

/// Exact columns from snapshots: c0[t] = dataset-average objective at theta^t,
/// c_j[t] = g_j(exact rates at theta^t). `skeleton` supplies (m, d, D, b, theta0).
ShrinkInstance build_shrink_instance(const ConstraintProblem& problem,
                                     const TwoLayerNet& skeleton,
                                     const std::vector<Vector>& snapshots,
                                     std::optional<Scalar> epsilon);

}  // namespace conlearn
