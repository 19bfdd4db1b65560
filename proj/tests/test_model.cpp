#include "conlearn/model.hpp"
#include "conlearn/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace conlearn;

TEST_CASE("init is bitwise reproducible under a fixed seed") {
  const TwoLayerNet a = init_net(4, 8, 1.0, 7);
  const TwoLayerNet b = init_net(4, 8, 1.0, 7);
  CHECK(a.theta() == b.theta());
  CHECK(a.signs() == b.signs());
  CHECK(a.theta0() == b.theta0());
}

TEST_CASE("init weight rows have unit mean squared norm") {
  const TwoLayerNet net = init_net(4096, 16, 1.0, 0);
  Scalar acc = 0.0;
  for (Index i = 0; i < net.width(); ++i) acc += net.unit(i).squaredNorm();
  const Scalar mean = acc / 4096.0;
  CHECK(mean > 0.9);
  CHECK(mean < 1.1);
}

TEST_CASE("init signs are +-1 with balanced frequency") {
  const TwoLayerNet net = init_net(64, 8, 1.0, 0);
  Index plus = 0;
  for (Index i = 0; i < 64; ++i) {
    const Scalar b = net.signs()[i];
    CHECK((b == 1.0 || b == -1.0));
    if (b == 1.0) ++plus;
  }
  CHECK(std::abs(plus / 64.0 - 0.5) <= 4.0 / std::sqrt(64.0));
}

TEST_CASE("init rejects d < 3") {
  CHECK_THROWS_WITH_AS(init_net(4, 2, 1.0, 0),
                       doctest::Contains("inverse-chi-squared"),
                       std::invalid_argument);
}

TEST_CASE("forward hand values") {
  TwoLayerNet net = init_net(1, 3, 1.0, 0);
  net.theta() << 1.0, 0.0, 0.0;
  const bool positive = net.signs()[0] == 1.0;

  Vector x(3);
  x << 0.5, 0.0, 0.0;
  CHECK(forward(net, x) == doctest::Approx(positive ? 0.5 : -0.5));

  x.setZero();
  CHECK(forward(net, x) == 0.0);
}

TEST_CASE("forward cancels mirrored units") {
  TwoLayerNet net(2, 3, 1.0, 0, Vector::Zero(6), Vector::Zero(6),
                  (Vector(2) << 1.0, -1.0).finished());
  net.theta() << 0.3, -0.2, 0.7, 0.3, -0.2, 0.7;
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = 0.9 * rng.unit_vector(3);
    CHECK(forward(net, x) == doctest::Approx(0.0));
  }
}

TEST_CASE("forward rejects dimension mismatch") {
  const TwoLayerNet net = init_net(2, 4, 1.0, 0);
  CHECK_THROWS_AS(forward(net, Vector::Zero(3)), std::invalid_argument);
}

TEST_CASE("grad_theta analytic block for an active unit") {
  TwoLayerNet net(1, 3, 1.0, 0, Vector::Zero(3), Vector::Zero(3),
                  Vector::Ones(1));
  net.theta() << 1.0, 0.0, 0.0;
  Vector x(3);
  x << 0.5, 0.2, 0.0;
  const Vector g = grad_theta(net, x);
  CHECK(g[0] == doctest::Approx(0.5));
  CHECK(g[1] == doctest::Approx(0.2));
  CHECK(g[2] == doctest::Approx(0.0));
}

TEST_CASE("grad_theta is zero for inactive units and zero input") {
  TwoLayerNet net(2, 3, 1.0, 0, Vector::Zero(6), Vector::Zero(6),
                  (Vector(2) << 1.0, -1.0).finished());
  net.theta() << -1.0, 0.0, 0.0, -0.5, 0.0, 0.0;
  Vector x(3);
  x << 0.9, 0.0, 0.0;  // a_i^T x < 0 for both units
  CHECK(grad_theta(net, x).norm() == 0.0);
  CHECK(grad_theta(net, Vector::Zero(3)).norm() == 0.0);
}

TEST_CASE("grad norm never exceeds the input norm") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    TwoLayerNet net = init_net(16, 6, 2.0, 100 + trial);
    net.theta() += 2.0 * rng.uniform() * rng.unit_vector(net.theta().size());
    const Vector x = rng.uniform() * rng.unit_vector(6);
    CHECK(grad_theta(net, x).norm() <= x.norm() + 1e-12);
    CHECK(grad_theta(net, x).norm() <= 1.0 + 1e-12);
  }
}

TEST_CASE("central finite differences match grad_theta away from kinks") {
  Rng rng(3);
  const Index m = 8, d = 5;
  int checked = 0;
  while (checked < 5) {
    TwoLayerNet net = init_net(m, d, 1.0, 40 + checked);
    net.theta() += rng.uniform() * rng.unit_vector(m * d);
    project_theta_inplace(net);
    const Vector x = rng.uniform(0.5, 1.0) * rng.unit_vector(d);
    if ((net.weights() * x).cwiseAbs().minCoeff() <= 1e-3) continue;
    ++checked;
    const Vector g = grad_theta(net, x);
    const Scalar h = 1e-6;
    for (Index i = 0; i < m * d; ++i) {
      TwoLayerNet plus = net, minus = net;
      plus.theta()[i] += h;
      minus.theta()[i] -= h;
      const Scalar fd = (forward(plus, x) - forward(minus, x)) / (2 * h);
      CHECK(std::abs(fd - g[i]) <=
            1e-5 * std::max(1.0, std::abs(g[i])) + 1e-12);
    }
  }
}

TEST_CASE("forward_linear equals forward exactly at the init point") {
  Rng rng(9);
  const TwoLayerNet net = init_net(32, 6, 1.0, 2);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = rng.uniform() * rng.unit_vector(6);
    CHECK(forward_linear(net, x) == forward(net, x));
  }
}

TEST_CASE("forward_linear uses the init masks with current weights") {
  // theta0 = (1,0,0) activates the unit at x = e1 while theta = (-1,0,0)
  const TwoLayerNet net(1, 3, 4.0, 0, (Vector(3) << -1.0, 0.0, 0.0).finished(),
                        (Vector(3) << 1.0, 0.0, 0.0).finished(), Vector::Ones(1));
  Vector x(3);
  x << 1.0, 0.0, 0.0;
  CHECK(forward_linear(net, x) == doctest::Approx(-1.0));
  CHECK(forward(net, x) == 0.0);
  CHECK(forward_linear(net, Vector::Zero(3)) == 0.0);
}

TEST_CASE("forward_linear is the feature-map inner product") {
  Rng rng(21);
  TwoLayerNet net = init_net(16, 5, 2.0, 33);
  net.theta() += 2.0 * rng.unit_vector(net.theta().size());
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = rng.uniform() * rng.unit_vector(5);
    const FeatureMap0 fm = feature_map0(net, x);
    CHECK(forward_linear(net, x) == doctest::Approx(fm.dot(net.theta())));
    CHECK(fm.to_vector().dot(net.theta()) ==
          doctest::Approx(forward_linear(net, x)));
    CHECK(fm.to_vector().squaredNorm() <= x.squaredNorm() + 1e-12);
    // linearity: y0(u) - y0(v) = f0(x)^T (u - v)
    const Vector u = rng.gaussian_vector(net.theta().size());
    const Vector v = rng.gaussian_vector(net.theta().size());
    CHECK(fm.dot(u) - fm.dot(v) == doctest::Approx(fm.dot(u - v)));
    // and the same through the nets themselves
    TwoLayerNet netu = net, netv = net;
    netu.theta() = net.theta0() + u;
    netv.theta() = net.theta0() + v;
    CHECK(forward_linear(netu, x) - forward_linear(netv, x) ==
          doctest::Approx(fm.dot(netu.theta() - netv.theta())));
  }
}

TEST_CASE("projection: interior points unchanged, boundary radial") {
  TwoLayerNet net = init_net(4, 4, 2.0, 1);
  Rng rng(17);
  const Vector u = rng.unit_vector(16);

  net.theta() = net.theta0() + 1.0 * u;  // ||delta|| = D/2
  const Vector before = net.theta();
  project_theta_inplace(net);
  CHECK(net.theta() == before);

  net.theta() = net.theta0() + 4.0 * u;  // 2D
  project_theta_inplace(net);
  CHECK((net.theta() - (net.theta0() + 2.0 * u)).norm() ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("projection is idempotent and non-expansive") {
  Rng rng(23);
  TwoLayerNet net = init_net(4, 4, 1.5, 1);
  for (int trial = 0; trial < 20; ++trial) {
    TwoLayerNet a = net, b = net;
    a.theta() = net.theta0() + 3.0 * rng.uniform() * rng.unit_vector(16);
    b.theta() = net.theta0() + 3.0 * rng.uniform() * rng.unit_vector(16);
    const Scalar dist_before = (a.theta() - b.theta()).norm();
    TwoLayerNet pa = project_theta(a), pb = project_theta(b);
    CHECK((pa.theta() - project_theta(pa).theta()).norm() == 0.0);
    CHECK((pa.theta() - pb.theta()).norm() <= dist_before + 1e-12);
    CHECK(pa.dist_from_init() <= 1.5 + 1e-12);
  }
}

TEST_CASE("forward_flat matches forward") {
  Rng rng(29);
  TwoLayerNet net = init_net(8, 4, 1.0, 3);
  net.theta() += rng.unit_vector(32);
  const Vector x = 0.8 * rng.unit_vector(4);
  CHECK(forward_flat(net.signs(), 8, 4, net.theta(), x) ==
        doctest::Approx(forward(net, x)));
}
