#pragma once

#include "conlearn/rng.hpp"
#include "conlearn/types.hpp"

#include <cstdint>

namespace conlearn {

/// Two-layer ReLU network
///   y(theta; x) = m^{-1/2} sum_i b_i * max(0, a_i^T x),
/// with fixed output signs b_i in {-1,+1} and hidden weights theta =
/// (a_1^T, ..., a_m^T)^T stored as one flat md-vector. The search space is the
/// ball Theta = { theta : ||theta - theta0|| <= D } around the init snapshot.
class TwoLayerNet {
 public:
  TwoLayerNet(Index m, Index d, Scalar radius, std::uint64_t seed, Vector theta,
              Vector theta0, Vector signs);

  Index width() const { return m_; }
  Index input_dim() const { return d_; }
  Scalar radius() const { return D_; }
  std::uint64_t seed() const { return seed_; }

  const Vector& theta() const { return theta_; }
  Vector& theta() { return theta_; }
  /// Init snapshot theta0; immutable after construction.
  const Vector& theta0() const { return theta0_; }
  const Vector& signs() const { return signs_; }

  /// Hidden weight row a_i of the current weights.
  Eigen::Map<const Eigen::RowVectorXd> unit(Index i) const {
    return {theta_.data() + i * d_, d_};
  }

  /// m x d row-major views of the flat weight vectors.
  Eigen::Map<const RowMatrix> weights() const { return {theta_.data(), m_, d_}; }
  Eigen::Map<const RowMatrix> weights0() const { return {theta0_.data(), m_, d_}; }

  Scalar dist_from_init() const { return (theta_ - theta0_).norm(); }

 private:
  Index m_;
  Index d_;
  Scalar D_;
  std::uint64_t seed_;
  Vector theta_;
  Vector theta0_;
  Vector signs_;
};

/// Feature map f0(x) of the linearization at theta0: block i is
/// b_i * 1{(a_i^0)^T x > 0} * x / sqrt(m). Depends only on theta0 and x.
struct FeatureMap0 {
  BoolArray active;  // 1{(a_i^0)^T x > 0}
  Vector signs;
  Vector x;
  Scalar scale = 0.0;  // 1/sqrt(m)

  /// f0(x)^T v for a flat md-vector v, without materializing f0.
  Scalar dot(const Vector& v) const;
  /// The explicit md-vector (tests, small m).
  Vector to_vector() const;
};

/// Fresh net: b_i ~ Uniform{-1,+1}, entries of a_i^0 i.i.d. N(0, 1/d),
/// theta = theta0. Rejects d < 3 (the linearization analysis divides by d-2,
/// so the inverse-chi-squared moment must exist).
TwoLayerNet init_net(Index m, Index d, Scalar radius, std::uint64_t seed);

/// Pre-activations A x (current weights).
Vector preactivations(const TwoLayerNet& net, const VecRef& x);

Scalar forward(const TwoLayerNet& net, const VecRef& x);

/// Gradient of forward w.r.t. theta: block i = b_i * 1{a_i^T x > 0} * x / sqrt(m).
/// At the ReLU kink a_i^T x = 0 the subgradient choice is 0, matching the
/// strict inequality in the forward mask.
Vector grad_theta(const TwoLayerNet& net, const VecRef& x);

/// Linearization at init: y0(theta; x) = m^{-1/2} sum_i b_i 1{(a_i^0)^T x > 0} a_i^T x.
/// Exactly equals forward when theta == theta0.
Scalar forward_linear(const TwoLayerNet& net, const VecRef& x);

FeatureMap0 feature_map0(const TwoLayerNet& net, const VecRef& x);

/// Projection onto Theta; idempotent and non-expansive. Radial scaling when
/// ||theta - theta0|| > D, identity otherwise.
void project_theta_inplace(TwoLayerNet& net);
TwoLayerNet project_theta(TwoLayerNet net);

/// theta_i += coef * b_i * 1{a_i^T x > 0} * x / sqrt(m) for all i; the SGD
/// primitive equivalent to theta += coef * grad_theta(net, x) without
/// materializing the md-vector.
void add_scaled_grad(TwoLayerNet& net, const VecRef& x, Scalar coef);

/// Forward pass straight from a flat weight vector (snapshot evaluation
/// without constructing a net).
Scalar forward_flat(const Vector& signs, Index m, Index d, const Vector& theta,
                    const VecRef& x);

}  // namespace conlearn
