#pragma once

#include "conlearn/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace conlearn {

/// Scalar loss/metric kinds h(y, z) on score y and label z in {-1,+1}.
///
/// Convex surrogates and the indicator metrics they dominate pointwise:
///   hinge                 max(0, 1 - z y)   >= misclassification and neg-zero-one-match
///   reverse-hinge         max(0, 1 + z y)   >= zero-one-match and neg-zero-one-match
/// The reverse hinge is the classical max(-1, z y) shifted up by 1; the shift
/// leaves every gradient unchanged and restores pointwise domination of the
/// match indicator, which max(-1, z y) does not satisfy. Smoothed variants
/// replace the max kink with a quadratic on [-s, s] and still dominate.
enum class LossKind {
  Hinge,
  SmoothedHinge,
  ReverseHinge,
  SmoothedReverseHinge,
  ZeroOneMatch,
  NegZeroOneMatch,
  Misclassification,
  CrossEntropyOnScore,
  Zero,
};

struct ScalarLoss {
  LossKind kind = LossKind::Hinge;
  Scalar smoothing = 0.0;  // quadratic half-width for smoothed kinds
  Scalar lipschitz = 1.0;  // bounds |d/dy| and the gradient's modulus of continuity
};

/// Default surrogate smoothing; Assumption-style analysis wants differentiable
/// surrogates and the quadratic half-width 0.1 keeps the Lipschitz constant at 5.
inline constexpr Scalar kDefaultSmoothing = 0.1;

ScalarLoss make_loss(LossKind kind, Scalar smoothing = kDefaultSmoothing);

const std::string& loss_kind_name(LossKind kind);
std::optional<LossKind> loss_kind_from_name(const std::string& name);

bool is_convex(LossKind kind);
bool has_gradient(LossKind kind);  // indicator kinds have none

Scalar eval_loss(const ScalarLoss& loss, Scalar y, int z);
/// d/dy; throws for indicator kinds (they must never reach the theta player).
Scalar eval_loss_grad(const ScalarLoss& loss, Scalar y, int z);

/// sup over y in [ylo, yhi], z in {-1,+1} of |h(y, z)|; closed form for every
/// shipped kind, dense grid with a 1% safety margin otherwise.
Scalar sup_abs_loss(const ScalarLoss& loss, Scalar ylo, Scalar yhi);

// ---------------------------------------------------------------------------

/// Outer constraint functions g(xi) <= 0; jointly convex and monotonically
/// increasing coordinate-wise on their valid domain.
///
/// Rate-based kinds (g-mean, h-mean) expect auxiliary variables bounding the
/// NEGATED rates, i.e. xi_k >= -rate_k via the neg-zero-one-match metric, and
/// reconstruct tau_k = clamp(-xi_k, eps_rate, 1). Written on raw rates these
/// functions would be decreasing; the negated encoding restores monotonicity
/// without changing the constrained set.
enum class OuterKind { LinearCombination, GMean, HMean };

inline constexpr Scalar kRateEpsilon = 1e-3;

struct OuterConstraint {
  OuterKind kind = OuterKind::LinearCombination;
  Vector coefficients;  // linear kind only; must be >= 0 coordinate-wise
  Index arity = 0;
  Scalar lipschitz = 1.0;             // w.r.t. the infinity norm on xi
  std::vector<int> monotonicity;      // +1 per coordinate for all shipped kinds
};

OuterConstraint make_linear_outer(Vector coefficients);
OuterConstraint make_gmean_outer();
OuterConstraint make_hmean_outer();

const std::string& outer_kind_name(OuterKind kind);
std::optional<OuterKind> outer_kind_from_name(const std::string& name);

Scalar eval_outer(const OuterConstraint& g, const VecRef& xi);
Vector eval_outer_grad(const OuterConstraint& g, const VecRef& xi);

}  // namespace conlearn
