#pragma once

#include "conlearn/data.hpp"
#include "conlearn/losses.hpp"
#include "conlearn/model.hpp"
#include "conlearn/rng.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace conlearn {

/// Uniform sampling distribution over a filtered subset of dataset rows.
struct DistributionSpec {
  std::string name;               // e.g. "group=A,z=+1"
  std::optional<int> group;       // 1 = A, 0 = Ac
  std::optional<int> label;       // +1 / -1
  std::vector<Index> indices;     // matching rows, non-empty

  Index size() const { return static_cast<Index>(indices.size()); }
  Index sample(Rng& rng) const {
    return indices[static_cast<size_t>(rng.uniform_index(size()))];
  }
};

DistributionSpec make_sampler(const Dataset& ds, std::optional<int> group,
                              std::optional<int> label);

/// The constrained problem: objective h0 with sampler D0, K metrics h_k with
/// convex surrogates and samplers D_1..D_K, and J outer functions g_j(xi) <= 0.
/// Domains derived here:
///   Xi: per-coordinate box |xi_k| <= sup_{|y|<=2D, z} |surrogate_k(y, z)|,
///   Lambda: [0, kappa]^{J+K}.
struct ConstraintProblem {
  ScalarLoss objective;
  std::vector<ScalarLoss> metrics;
  std::vector<ScalarLoss> surrogates;
  std::vector<OuterConstraint> outers;
  std::vector<DistributionSpec> samplers;  // K+1, index 0 = D0
  Scalar kappa = 1.0;
  Scalar radius = 1.0;  // D; must match the model radius
  Vector xi_bound;      // K entries
  std::shared_ptr<const Dataset> dataset;

  Index num_metrics() const { return static_cast<Index>(metrics.size()); }   // K
  Index num_outers() const { return static_cast<Index>(outers.size()); }     // J

  void validate() const;
};

/// Per-coordinate Xi bounds from the surrogate sup-norms on |y| <= 2D.
Vector compute_xi_domain(const std::vector<ScalarLoss>& surrogates, Scalar radius);

/// Coordinate-wise projections onto the boxes Xi and Lambda.
void clamp_xi_inplace(const ConstraintProblem& p, Vector& xi);
void clamp_lambda_inplace(const ConstraintProblem& p, Vector& lambda);

/// Exact population rate r_k(theta) = mean of h_k(y(theta; x), z) over the
/// finite rows behind D_k (k in 1..K; this is the brute-force oracle).
Scalar exact_rate(const ConstraintProblem& p, Index k, const TwoLayerNet& net);
Vector exact_rates(const ConstraintProblem& p, const TwoLayerNet& net);

/// Exact objective r_0(theta) over D0's rows.
Scalar exact_objective(const ConstraintProblem& p, const TwoLayerNet& net);

/// g_j values at a rate (or xi) vector.
Vector eval_outers(const ConstraintProblem& p, const VecRef& xi);

/// Unconstrained problem (K = 0, J = 0): plain stochastic training of h0.
ConstraintProblem build_unconstrained_problem(std::shared_ptr<const Dataset> ds,
                                              LossKind objective_kind,
                                              Scalar kappa, Scalar radius);

/// Equal-opportunity preset (K = 4, J = 2): recall parity across groups on the
/// positive class. Metrics are the match indicator on the (A, z=1) and (Ac, z=1)
/// cells followed by its negation on the same cells; the linear outers
/// xi_1 + xi_4 and xi_2 + xi_3 encode both directions of
/// recall(A) - recall(Ac) <= 0. Surrogates: smoothed reverse hinge for the
/// match metrics, smoothed hinge for the negated ones.
ConstraintProblem build_fairness_problem(std::shared_ptr<const Dataset> ds,
                                         LossKind objective_kind, Scalar kappa,
                                         Scalar radius);

/// G-mean / H-mean presets (K = 2, J = 1) on the class-conditional cells, with
/// the negated-rate encoding expected by those outer kinds.
ConstraintProblem build_rate_mean_problem(std::shared_ptr<const Dataset> ds,
                                          OuterKind mean_kind,
                                          LossKind objective_kind, Scalar kappa,
                                          Scalar radius);

}  // namespace conlearn
