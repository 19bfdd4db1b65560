#include "conlearn/losses.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace conlearn {
namespace {

// Quadratic smoothing of max(0, u) with half-width s: C^1, convex, and
// dominates max(0, u).
Scalar smooth_relu(Scalar u, Scalar s) {
  if (u <= -s) return 0.0;
  if (u >= s) return u;
  const Scalar t = u + s;
  return t * t / (4.0 * s);
}

Scalar smooth_relu_deriv(Scalar u, Scalar s) {
  return std::clamp((u + s) / (2.0 * s), 0.0, 1.0);
}

Scalar softplus(Scalar u) {
  // log(1 + e^u), overflow-safe
  return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u)));
}

void check_label(int z) {
  require(z == 1 || z == -1, "label must be -1 or +1");
}

const std::array<std::pair<LossKind, std::string>, 9> kLossNames = {{
    {LossKind::Hinge, "hinge"},
    {LossKind::SmoothedHinge, "smoothed-hinge"},
    {LossKind::ReverseHinge, "reverse-hinge"},
    {LossKind::SmoothedReverseHinge, "smoothed-reverse-hinge"},
    {LossKind::ZeroOneMatch, "zero-one-match"},
    {LossKind::NegZeroOneMatch, "neg-zero-one-match"},
    {LossKind::Misclassification, "misclassification"},
    {LossKind::CrossEntropyOnScore, "cross-entropy-on-score"},
    {LossKind::Zero, "zero"},
}};

}  // namespace

ScalarLoss make_loss(LossKind kind, Scalar smoothing) {
  ScalarLoss loss;
  loss.kind = kind;
  switch (kind) {
    case LossKind::SmoothedHinge:
    case LossKind::SmoothedReverseHinge:
      require(smoothing > 0.0, "smoothed losses need smoothing > 0");
      loss.smoothing = smoothing;
      // gradient bound is 1; the gradient's Lipschitz modulus is 1/(2s)
      loss.lipschitz = std::max(1.0, 1.0 / (2.0 * smoothing));
      break;
    case LossKind::CrossEntropyOnScore:
      loss.lipschitz = 1.0;  // |grad| <= 1 and curvature <= 1/4
      break;
    default:
      loss.lipschitz = 1.0;
      break;
  }
  return loss;
}

const std::string& loss_kind_name(LossKind kind) {
  for (const auto& [k, n] : kLossNames)
    if (k == kind) return n;
  throw std::logic_error("unknown loss kind");
}

std::optional<LossKind> loss_kind_from_name(const std::string& name) {
  for (const auto& [k, n] : kLossNames)
    if (n == name) return k;
  return std::nullopt;
}

bool is_convex(LossKind kind) {
  switch (kind) {
    case LossKind::ZeroOneMatch:
    case LossKind::NegZeroOneMatch:
    case LossKind::Misclassification:
      return false;
    default:
      return true;
  }
}

bool has_gradient(LossKind kind) {
  switch (kind) {
    case LossKind::ZeroOneMatch:
    case LossKind::NegZeroOneMatch:
    case LossKind::Misclassification:
      return false;
    default:
      return true;
  }
}

Scalar eval_loss(const ScalarLoss& loss, Scalar y, int z) {
  check_label(z);
  const Scalar zy = static_cast<Scalar>(z) * y;
  switch (loss.kind) {
    case LossKind::Hinge:
      return std::max(0.0, 1.0 - zy);
    case LossKind::SmoothedHinge:
      return smooth_relu(1.0 - zy, loss.smoothing);
    case LossKind::ReverseHinge:
      return std::max(0.0, 1.0 + zy);
    case LossKind::SmoothedReverseHinge:
      return smooth_relu(1.0 + zy, loss.smoothing);
    case LossKind::ZeroOneMatch:
      return z == sgn(y) ? 1.0 : 0.0;
    case LossKind::NegZeroOneMatch:
      return z == sgn(y) ? -1.0 : 0.0;
    case LossKind::Misclassification:
      return z != sgn(y) ? 1.0 : 0.0;
    case LossKind::CrossEntropyOnScore:
      return softplus(-zy);
    case LossKind::Zero:
      return 0.0;
  }
  throw std::logic_error("unknown loss kind");
}

Scalar eval_loss_grad(const ScalarLoss& loss, Scalar y, int z) {
  check_label(z);
  const Scalar zf = static_cast<Scalar>(z);
  const Scalar zy = zf * y;
  switch (loss.kind) {
    case LossKind::Hinge:
      return (1.0 - zy > 0.0) ? -zf : 0.0;
    case LossKind::SmoothedHinge:
      return -zf * smooth_relu_deriv(1.0 - zy, loss.smoothing);
    case LossKind::ReverseHinge:
      return (1.0 + zy > 0.0) ? zf : 0.0;
    case LossKind::SmoothedReverseHinge:
      return zf * smooth_relu_deriv(1.0 + zy, loss.smoothing);
    case LossKind::CrossEntropyOnScore:
      return -zf / (1.0 + std::exp(zy));
    case LossKind::Zero:
      return 0.0;
    case LossKind::ZeroOneMatch:
    case LossKind::NegZeroOneMatch:
    case LossKind::Misclassification:
      throw std::domain_error("indicator metric '" + loss_kind_name(loss.kind) +
                              "' has no usable gradient; only surrogates may "
                              "reach the theta player");
  }
  throw std::logic_error("unknown loss kind");
}

Scalar sup_abs_loss(const ScalarLoss& loss, Scalar ylo, Scalar yhi) {
  require(ylo <= yhi, "empty score interval");
  // zy ranges over [-u, u] with u = max(|ylo|, |yhi|); every shipped kind is
  // monotone in zy on one side, so the sup sits at an endpoint.
  const Scalar u = std::max(std::abs(ylo), std::abs(yhi));
  switch (loss.kind) {
    case LossKind::Hinge:
      return 1.0 + u;
    case LossKind::SmoothedHinge:
      return smooth_relu(1.0 + u, loss.smoothing);
    case LossKind::ReverseHinge:
      return 1.0 + u;
    case LossKind::SmoothedReverseHinge:
      return smooth_relu(1.0 + u, loss.smoothing);
    case LossKind::ZeroOneMatch:
    case LossKind::NegZeroOneMatch:
    case LossKind::Misclassification:
      return 1.0;
    case LossKind::CrossEntropyOnScore:
      return softplus(u);
    case LossKind::Zero:
      return 0.0;
  }
  // Grid fallback with a 1% safety margin, kept for kinds added later.
  Scalar sup = 0.0;
  const int n = 4096;
  for (int i = 0; i <= n; ++i) {
    const Scalar y = ylo + (yhi - ylo) * static_cast<Scalar>(i) / n;
    sup = std::max({sup, std::abs(eval_loss(loss, y, 1)),
                    std::abs(eval_loss(loss, y, -1))});
  }
  return 1.01 * sup;
}

// ---------------------------------------------------------------------------

namespace {

const std::array<std::pair<OuterKind, std::string>, 3> kOuterNames = {{
    {OuterKind::LinearCombination, "linear-combination"},
    {OuterKind::GMean, "g-mean"},
    {OuterKind::HMean, "h-mean"},
}};

Scalar rate_from_xi(Scalar xi) {
  return std::clamp(-xi, kRateEpsilon, 1.0);
}

}  // namespace

OuterConstraint make_linear_outer(Vector coefficients) {
  OuterConstraint g;
  g.kind = OuterKind::LinearCombination;
  require(coefficients.size() >= 1, "linear outer needs coefficients");
  require((coefficients.array() >= 0.0).all(),
          "linear outer coefficients must be >= 0 (monotone increasing)");
  g.arity = coefficients.size();
  g.lipschitz = coefficients.lpNorm<1>();
  g.monotonicity.assign(static_cast<size_t>(g.arity), 1);
  g.coefficients = std::move(coefficients);
  return g;
}

OuterConstraint make_gmean_outer() {
  OuterConstraint g;
  g.kind = OuterKind::GMean;
  g.arity = 2;
  // sup of |dg/dtau_1| + |dg/dtau_2| on [eps,1]^2
  g.lipschitz = 0.5 * (std::sqrt(1.0 / kRateEpsilon) + std::sqrt(kRateEpsilon));
  g.monotonicity = {1, 1};
  return g;
}

OuterConstraint make_hmean_outer() {
  OuterConstraint g;
  g.kind = OuterKind::HMean;
  g.arity = 2;
  g.lipschitz = 2.0;
  g.monotonicity = {1, 1};
  return g;
}

const std::string& outer_kind_name(OuterKind kind) {
  for (const auto& [k, n] : kOuterNames)
    if (k == kind) return n;
  throw std::logic_error("unknown outer kind");
}

std::optional<OuterKind> outer_kind_from_name(const std::string& name) {
  for (const auto& [k, n] : kOuterNames)
    if (n == name) return k;
  return std::nullopt;
}

Scalar eval_outer(const OuterConstraint& g, const VecRef& xi) {
  require(xi.size() == g.arity, "xi arity mismatch");
  switch (g.kind) {
    case OuterKind::LinearCombination:
      return g.coefficients.dot(xi);
    case OuterKind::GMean: {
      const Scalar t1 = rate_from_xi(xi[0]);
      const Scalar t2 = rate_from_xi(xi[1]);
      return 1.0 - std::sqrt(t1 * t2);
    }
    case OuterKind::HMean: {
      const Scalar t1 = rate_from_xi(xi[0]);
      const Scalar t2 = rate_from_xi(xi[1]);
      return 1.0 - 2.0 * t1 * t2 / (t1 + t2);
    }
  }
  throw std::logic_error("unknown outer kind");
}

Vector eval_outer_grad(const OuterConstraint& g, const VecRef& xi) {
  require(xi.size() == g.arity, "xi arity mismatch");
  switch (g.kind) {
    case OuterKind::LinearCombination:
      return g.coefficients;
    case OuterKind::GMean: {
      const Scalar t1 = rate_from_xi(xi[0]);
      const Scalar t2 = rate_from_xi(xi[1]);
      const Scalar root = std::sqrt(t1 * t2);
      Vector out(2);
      // d/dxi = -d/dtau with dtau/dxi = -1 where the clamp is inactive
      out[0] = (-xi[0] > kRateEpsilon && -xi[0] < 1.0) ? 0.5 * t2 / root : 0.0;
      out[1] = (-xi[1] > kRateEpsilon && -xi[1] < 1.0) ? 0.5 * t1 / root : 0.0;
      return out;
    }
    case OuterKind::HMean: {
      const Scalar t1 = rate_from_xi(xi[0]);
      const Scalar t2 = rate_from_xi(xi[1]);
      const Scalar den = (t1 + t2) * (t1 + t2);
      Vector out(2);
      out[0] = (-xi[0] > kRateEpsilon && -xi[0] < 1.0) ? 2.0 * t2 * t2 / den : 0.0;
      out[1] = (-xi[1] > kRateEpsilon && -xi[1] < 1.0) ? 2.0 * t1 * t1 / den : 0.0;
      return out;
    }
  }
  throw std::logic_error("unknown outer kind");
}

}  // namespace conlearn
