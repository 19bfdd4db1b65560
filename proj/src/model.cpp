#include "conlearn/model.hpp"

#include <cmath>
#include <utility>

namespace conlearn {

TwoLayerNet::TwoLayerNet(Index m, Index d, Scalar radius, std::uint64_t seed,
                         Vector theta, Vector theta0, Vector signs)
    : m_(m), d_(d), D_(radius), seed_(seed), theta_(std::move(theta)),
      theta0_(std::move(theta0)), signs_(std::move(signs)) {
  require(m_ >= 1, "width m must be >= 1");
  require(d_ >= 3, "input dim d must be >= 3: the width analysis needs the "
                   "inverse-chi-squared moment 1/(d-2)");
  require(D_ > 0.0, "radius D must be positive");
  require(theta_.size() == m_ * d_, "theta size != m*d");
  require(theta0_.size() == m_ * d_, "theta0 size != m*d");
  require(signs_.size() == m_, "signs size != m");
  for (Index i = 0; i < m_; ++i)
    require(signs_[i] == 1.0 || signs_[i] == -1.0, "output signs must be +-1");
}

TwoLayerNet init_net(Index m, Index d, Scalar radius, std::uint64_t seed) {
  require(m >= 1, "width m must be >= 1");
  require(d >= 3, "input dim d must be >= 3: the width analysis needs the "
                  "inverse-chi-squared moment 1/(d-2)");
  require(radius > 0.0, "radius D must be positive");
  Rng rng(seed);
  const Scalar sd = 1.0 / std::sqrt(static_cast<Scalar>(d));
  Vector theta0(m * d);
  for (Index i = 0; i < m * d; ++i) theta0[i] = sd * rng.gaussian();
  Vector signs(m);
  for (Index i = 0; i < m; ++i) signs[i] = static_cast<Scalar>(rng.rademacher());
  Vector theta = theta0;
  return TwoLayerNet(m, d, radius, seed, std::move(theta), std::move(theta0),
                     std::move(signs));
}

Vector preactivations(const TwoLayerNet& net, const VecRef& x) {
  require(x.size() == net.input_dim(), "input dimension mismatch");
  return net.weights() * x;
}

Scalar forward(const TwoLayerNet& net, const VecRef& x) {
  const Vector pre = preactivations(net, x);
  // Same accumulation pattern as forward_linear, so the two agree bit-exactly
  // at theta == theta0.
  Scalar acc = 0.0;
  for (Index i = 0; i < net.width(); ++i) {
    if (pre[i] > 0.0) acc += net.signs()[i] * pre[i];
  }
  return acc / std::sqrt(static_cast<Scalar>(net.width()));
}

Vector grad_theta(const TwoLayerNet& net, const VecRef& x) {
  require(x.size() == net.input_dim(), "input dimension mismatch");
  const Index m = net.width();
  const Index d = net.input_dim();
  const Vector pre = net.weights() * x;
  const Scalar scale = 1.0 / std::sqrt(static_cast<Scalar>(m));
  Vector g = Vector::Zero(m * d);
  for (Index i = 0; i < m; ++i) {
    if (pre[i] > 0.0) g.segment(i * d, d) = (net.signs()[i] * scale) * x;
  }
  return g;
}

Scalar forward_linear(const TwoLayerNet& net, const VecRef& x) {
  require(x.size() == net.input_dim(), "input dimension mismatch");
  const Vector pre0 = net.weights0() * x;
  const Vector pre = net.weights() * x;
  Scalar acc = 0.0;
  for (Index i = 0; i < net.width(); ++i) {
    if (pre0[i] > 0.0) acc += net.signs()[i] * pre[i];
  }
  return acc / std::sqrt(static_cast<Scalar>(net.width()));
}

FeatureMap0 feature_map0(const TwoLayerNet& net, const VecRef& x) {
  require(x.size() == net.input_dim(), "input dimension mismatch");
  FeatureMap0 fm;
  fm.active = (net.weights0() * x).array() > 0.0;
  fm.signs = net.signs();
  fm.x = x;
  fm.scale = 1.0 / std::sqrt(static_cast<Scalar>(net.width()));
  return fm;
}

Scalar FeatureMap0::dot(const Vector& v) const {
  const Index m = active.size();
  const Index d = x.size();
  require(v.size() == m * d, "flat vector size != m*d");
  Scalar acc = 0.0;
  for (Index i = 0; i < m; ++i) {
    if (active[i]) acc += signs[i] * v.segment(i * d, d).dot(x);
  }
  return acc * scale;
}

Vector FeatureMap0::to_vector() const {
  const Index m = active.size();
  const Index d = x.size();
  Vector out = Vector::Zero(m * d);
  for (Index i = 0; i < m; ++i) {
    if (active[i]) out.segment(i * d, d) = (signs[i] * scale) * x;
  }
  return out;
}

void project_theta_inplace(TwoLayerNet& net) {
  const Vector delta = net.theta() - net.theta0();
  const Scalar norm = delta.norm();
  // The relative band absorbs the rounding of a previous radial scaling, which
  // makes the projection exactly idempotent.
  if (norm > net.radius() * (1.0 + 1e-12)) {
    net.theta() = net.theta0() + (net.radius() / norm) * delta;
  }
}

TwoLayerNet project_theta(TwoLayerNet net) {
  project_theta_inplace(net);
  return net;
}

Scalar forward_flat(const Vector& signs, Index m, Index d, const Vector& theta,
                    const VecRef& x) {
  require(theta.size() == m * d, "theta size != m*d");
  require(x.size() == d, "input dimension mismatch");
  const Eigen::Map<const RowMatrix> w(theta.data(), m, d);
  const Vector pre = w * x;
  return signs.dot(pre.cwiseMax(0.0)) / std::sqrt(static_cast<Scalar>(m));
}

void add_scaled_grad(TwoLayerNet& net, const VecRef& x, Scalar coef) {
  require(x.size() == net.input_dim(), "input dimension mismatch");
  if (coef == 0.0) return;
  const Index m = net.width();
  const Index d = net.input_dim();
  const Vector pre = net.weights() * x;
  const Scalar scale = coef / std::sqrt(static_cast<Scalar>(m));
  Vector& th = net.theta();
  for (Index i = 0; i < m; ++i) {
    if (pre[i] > 0.0) {
      th.segment(i * d, d) += (net.signs()[i] * scale) * x;
    }
  }
}

}  // namespace conlearn
