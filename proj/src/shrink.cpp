#include "conlearn/shrink.hpp"

#include <algorithm>
#include <cmath>

namespace conlearn {

Scalar default_shrink_epsilon(const ShrinkInstance& instance) {
  const Index T = instance.num_snapshots();
  Scalar eps = 0.0;
  if (T == 0) return eps;
  const Vector uniform = Vector::Constant(T, 1.0 / static_cast<Scalar>(T));
  for (Index j = 0; j < instance.num_constraints(); ++j)
    eps = std::max(eps, instance.cj.row(j).dot(uniform));
  return eps;
}

ShrinkResult shrink(const ShrinkInstance& instance) {
  const Index T = instance.num_snapshots();
  const Index J = instance.num_constraints();
  require(T >= 1, "shrink needs at least one snapshot");
  require(instance.cj.cols() == T, "constraint column count != T");
  require(instance.epsilon >= 0.0, "epsilon must be nonnegative");
  require(instance.c0.allFinite() && instance.cj.allFinite(),
          "shrink instance must be finite");

  // Standard form: variables (p, s), rows [sum p = 1; C p + s = eps].
  Matrix A = Matrix::Zero(1 + J, T + J);
  Vector b(1 + J), c = Vector::Zero(T + J);
  A.row(0).head(T).setOnes();
  b[0] = 1.0;
  for (Index j = 0; j < J; ++j) {
    A.row(1 + j).head(T) = instance.cj.row(j);
    A(1 + j, T + j) = 1.0;
    b[1 + j] = instance.epsilon;
  }
  c.head(T) = instance.c0;

  const LpSolution lp = solve_lp(A, b, c);
  ShrinkResult res;
  if (lp.status != LpStatus::Optimal) {
    res.feasible = false;
    // Report the constraint that stays violated even at its best mixture.
    res.violation = -std::numeric_limits<Scalar>::infinity();
    for (Index j = 0; j < J; ++j) {
      const Scalar best = instance.cj.row(j).minCoeff() - instance.epsilon;
      if (best > res.violation) {
        res.violation = best;
        res.most_violated = j;
      }
    }
    res.message = "infeasible: constraint " + std::to_string(res.most_violated) +
                  " exceeds epsilon by at least " + std::to_string(res.violation) +
                  " on every mixture";
    return res;
  }

  res.feasible = true;
  res.p = lp.x.head(T);
  // Scrub vertex round-off and renormalize.
  for (Index t = 0; t < T; ++t)
    if (res.p[t] < 1e-12) res.p[t] = 0.0;
  res.p /= res.p.sum();
  res.objective = instance.c0.dot(res.p);
  res.nnz = (res.p.array() > 0.0).count();
  return res;
}

ShrinkInstance build_shrink_instance(const ConstraintProblem& problem,
                                     const TwoLayerNet& skeleton,
                                     const std::vector<Vector>& snapshots,
                                     std::optional<Scalar> epsilon) {
  const Index T = static_cast<Index>(snapshots.size());
  require(T >= 1, "need at least one snapshot");
  ShrinkInstance inst;
  inst.c0.resize(T);
  inst.cj.resize(problem.num_outers(), T);
  TwoLayerNet net = skeleton;
  for (Index t = 0; t < T; ++t) {
    net.theta() = snapshots[static_cast<size_t>(t)];
    inst.c0[t] = exact_objective(problem, net);
    const Vector rates = exact_rates(problem, net);
    const Vector g = eval_outers(problem, rates);
    inst.cj.col(t) = g;
  }
  inst.epsilon = epsilon ? *epsilon : default_shrink_epsilon(inst);
  require(inst.epsilon >= 0.0, "epsilon must be nonnegative");
  return inst;
}

}  // namespace conlearn
