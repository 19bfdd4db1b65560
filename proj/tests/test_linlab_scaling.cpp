#include "conlearn/linlab.hpp"
#include "conlearn/scaling.hpp"

#include <doctest.h>

#include <cmath>

using namespace conlearn;

TEST_CASE("exact power law fits to machine precision") {
  std::vector<Scalar> grid, means;
  for (const Scalar m : {64.0, 256.0, 1024.0, 4096.0}) {
    grid.push_back(m);
    means.push_back(3.0 * std::pow(m, -0.5));
  }
  const ScalingFit fit = fit_scaling_exponent(grid, means);
  CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-10));
  CHECK(fit.stderr_slope == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("fewer than three grid points is an error") {
  CHECK_THROWS_WITH_AS(fit_scaling_exponent({64.0, 128.0}, {1.0, 0.5}),
                       doctest::Contains(">= 3"), std::invalid_argument);
}

TEST_CASE("non-positive mean names the offending cell") {
  CHECK_THROWS_WITH_AS(fit_scaling_exponent({2.0, 4.0, 8.0}, {1.0, 0.0, 0.25}),
                       doctest::Contains("4"), std::domain_error);
}

TEST_CASE("noisy power law recovers the exponent within 0.1") {
  Rng rng(12);
  std::vector<Scalar> grid, means;
  std::vector<std::vector<Scalar>> cells;
  for (int i = 0; i < 8; ++i) {
    const Scalar g = std::pow(2.0, 4 + i);
    grid.push_back(g);
    std::vector<Scalar> cell;
    for (int r = 0; r < 200; ++r)
      cell.push_back(2.0 * std::pow(g, -0.7) *
                     (1.0 + 0.05 * rng.uniform(-1.0, 1.0)));
    Scalar mean = 0.0;
    for (const Scalar v : cell) mean += v;
    means.push_back(mean / cell.size());
    cells.push_back(std::move(cell));
  }
  const ScalingFit fit = fit_scaling_exponent(grid, means);
  CHECK(std::abs(fit.slope - (-0.7)) < 0.1);
  const ScalingFit bfit = fit_scaling_exponent_bootstrap(grid, cells, 100, 5);
  CHECK(std::abs(bfit.slope - (-0.7)) < 0.1);
  CHECK(bfit.stderr_slope < 0.05);
}

TEST_CASE("linearization error vanishes exactly at the init point") {
  Rng rng(1);
  for (const Index m : {16, 128}) {
    const TwoLayerNet net = init_net(m, 8, 1.0, 7);
    for (int trial = 0; trial < 20; ++trial) {
      const Vector x = sample_input(rng, 8);
      CHECK(forward(net, x) - forward_linear(net, x) == 0.0);
    }
  }
}

TEST_CASE("per-sample linearization bound holds deterministically") {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    TwoLayerNet net = init_net(32, 6, 1.5, 100 + trial);
    net.theta() += 1.5 * rng.uniform() * rng.unit_vector(net.theta().size());
    const Vector x = sample_input(rng, 6);
    const auto [lhs, rhs] = linearization_bound_sides(net, x);
    CHECK(lhs <= rhs + 1e-12);
  }
}

TEST_CASE("mask-count identity matches the explicit gradient difference") {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    TwoLayerNet net = init_net(24, 5, 2.0, 300 + trial);
    net.theta() += 2.0 * rng.unit_vector(net.theta().size());
    const Vector x = sample_input(rng, 5);
    // library identity: ||grad y - grad y0|| = ||x|| sqrt(#flips) / sqrt(m)
    const Vector g = grad_theta(net, x);
    const Vector g0 = feature_map0(net, x).to_vector();
    const Vector pre = net.weights() * x;
    const Vector pre0 = net.weights0() * x;
    Index flips = 0;
    for (Index i = 0; i < 24; ++i)
      if ((pre[i] > 0.0) != (pre0[i] > 0.0)) ++flips;
    const Scalar identity =
        x.norm() * std::sqrt(static_cast<Scalar>(flips)) / std::sqrt(24.0);
    CHECK((g - g0).norm() == doctest::Approx(identity));
    // triangle inequality consequence: difference never exceeds 2
    CHECK((g - g0).norm() <= 2.0 + 1e-12);
  }
}

TEST_CASE("linearization cells: zero at theta0 is represented, errors positive at rho = D") {
  ScalingExperiment exp;
  exp.m_grid = {32, 128};
  exp.D_grid = {1.0};
  exp.d = 8;
  exp.replicates = 50;
  exp.seed = 4;
  const auto cells = estimate_linearization_errors(exp);
  REQUIRE(cells.size() == 2);
  for (const auto& c : cells) {
    CHECK(c.mean_sq_dy > 0.0);
    CHECK(c.mean_grad_diff > 0.0);
    CHECK(c.stderr_sq_dy > 0.0);
    CHECK(static_cast<Index>(c.sq_samples.size()) == exp.replicates);
  }
  CHECK(cells[0].m == 32);
  CHECK(cells[1].m == 128);
  // wider nets linearize better
  CHECK(cells[1].mean_sq_dy < cells[0].mean_sq_dy);
}

TEST_CASE("linearization error grows with the perturbation radius") {
  ScalingExperiment exp;
  exp.m_grid = {256};
  exp.D_grid = {0.5, 1.0, 2.0, 4.0};
  exp.d = 8;
  exp.replicates = 200;
  exp.seed = 5;
  const auto cells = estimate_linearization_errors(exp);
  REQUIRE(cells.size() == 4);
  for (size_t i = 1; i < cells.size(); ++i)
    CHECK(cells[i].mean_sq_dy >= cells[i - 1].mean_sq_dy);
}

TEST_CASE("grid validation") {
  ScalingExperiment exp;
  exp.m_grid = {128, 64};
  exp.D_grid = {1.0};
  exp.replicates = 10;
  CHECK_THROWS_AS(estimate_linearization_errors(exp), std::invalid_argument);
  exp.m_grid = {64};
  exp.replicates = 2;
  CHECK_THROWS_AS(estimate_linearization_errors(exp), std::invalid_argument);
}

TEST_CASE("output bound estimates are m-stable and obey empirical Markov") {
  const auto cells = estimate_output_bound({64, 512}, 12, 400, 2.0, 6);
  REQUIRE(cells.size() == 2);
  for (const auto& c : cells) {
    CHECK(c.mean_abs > 0.0);
    // empirical Markov on the same sample: P(|y| > a) <= E|y| / a
    CHECK(c.p_exceed <= c.mean_abs / 2.0 + 1e-12);
  }
  const Scalar ratio =
      std::max(cells[0].mean_abs, cells[1].mean_abs) /
      std::min(cells[0].mean_abs, cells[1].mean_abs);
  CHECK(ratio < 2.0);
}
