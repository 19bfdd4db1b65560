#include "conlearn/linlab.hpp"

#include <cmath>

namespace conlearn {
namespace {

struct Moments {
  Scalar sum = 0.0, sum2 = 0.0;
  Index n = 0;
  void add(Scalar v) {
    sum += v;
    sum2 += v * v;
    ++n;
  }
  Scalar mean() const { return sum / static_cast<Scalar>(n); }
  Scalar stderr_mean() const {
    const Scalar m = mean();
    const Scalar var = std::max(0.0, sum2 / static_cast<Scalar>(n) - m * m);
    return std::sqrt(var / static_cast<Scalar>(n));
  }
};

}  // namespace

Vector sample_input(Rng& rng, Index d) {
  return rng.uniform(0.5, 1.0) * rng.unit_vector(d);
}

std::vector<BoundCell> estimate_output_bound(const std::vector<Index>& m_grid,
                                             Index d, Index replicates,
                                             Scalar threshold,
                                             std::uint64_t seed) {
  require(replicates >= 5, "need >= 5 replicates");
  std::vector<BoundCell> out;
  for (size_t gi = 0; gi < m_grid.size(); ++gi) {
    const Index m = m_grid[gi];
    Rng rng = Rng::stream(seed, 17 + gi);
    Moments abs_m, tail_m;
    for (Index r = 0; r < replicates; ++r) {
      const TwoLayerNet net = init_net(m, d, 1.0, rng.next_u64());
      const Vector x = sample_input(rng, d);
      const Scalar y = forward(net, x);
      abs_m.add(std::abs(y));
      tail_m.add(std::abs(y) > threshold ? 1.0 : 0.0);
    }
    BoundCell cell;
    cell.m = m;
    cell.mean_abs = abs_m.mean();
    cell.stderr_abs = abs_m.stderr_mean();
    cell.p_exceed = tail_m.mean();
    cell.stderr_p = tail_m.stderr_mean();
    out.push_back(cell);
  }
  return out;
}

std::vector<LinearizationCell> estimate_linearization_errors(
    const ScalingExperiment& exp) {
  require(!exp.m_grid.empty() && !exp.D_grid.empty(), "empty grid");
  require(exp.replicates >= 5, "need >= 5 replicates");
  for (size_t i = 1; i < exp.m_grid.size(); ++i)
    require(exp.m_grid[i] > exp.m_grid[i - 1], "m grid must be increasing");
  for (size_t i = 1; i < exp.D_grid.size(); ++i)
    require(exp.D_grid[i] > exp.D_grid[i - 1], "D grid must be increasing");

  std::vector<LinearizationCell> out;
  size_t cell_id = 0;
  for (const Index m : exp.m_grid) {
    for (const Scalar D : exp.D_grid) {
      Rng rng = Rng::stream(exp.seed, 1000 + cell_id++);
      LinearizationCell cell;
      cell.m = m;
      cell.D = D;
      Moments sq_m, abs_m, grad_m;
      cell.sq_samples.reserve(static_cast<size_t>(exp.replicates));
      cell.grad_samples.reserve(static_cast<size_t>(exp.replicates));
      for (Index r = 0; r < exp.replicates; ++r) {
        TwoLayerNet net = init_net(m, exp.d, D, rng.next_u64());
        // perturb at the boundary: theta = theta0 + D * u, ||u|| = 1
        net.theta() += D * rng.unit_vector(net.theta().size());
        const Vector x = sample_input(rng, exp.d);
        const Scalar y = forward(net, x);
        const Scalar y0 = forward_linear(net, x);
        const Scalar dy = y - y0;
        sq_m.add(dy * dy);
        abs_m.add(std::abs(dy));
        // ||grad y - grad y0|| = ||x|| sqrt(#mask flips) / sqrt(m); the masks
        // are the only difference between the two gradients.
        const Vector pre = net.weights() * x;
        const Vector pre0 = net.weights0() * x;
        Index flips = 0;
        for (Index i = 0; i < m; ++i)
          if ((pre[i] > 0.0) != (pre0[i] > 0.0)) ++flips;
        const Scalar gd = x.norm() * std::sqrt(static_cast<Scalar>(flips)) /
                          std::sqrt(static_cast<Scalar>(m));
        grad_m.add(gd);
        cell.sq_samples.push_back(dy * dy);
        cell.grad_samples.push_back(gd);
      }
      cell.mean_sq_dy = sq_m.mean();
      cell.stderr_sq_dy = sq_m.stderr_mean();
      cell.mean_abs_dy = abs_m.mean();
      cell.stderr_abs_dy = abs_m.stderr_mean();
      cell.mean_grad_diff = grad_m.mean();
      cell.stderr_grad_diff = grad_m.stderr_mean();
      out.push_back(std::move(cell));
    }
  }
  return out;
}

std::pair<Scalar, Scalar> linearization_bound_sides(const TwoLayerNet& net,
                                                    const VecRef& x) {
  const Scalar lhs = std::abs(forward(net, x) - forward_linear(net, x));
  const Index m = net.width();
  const Index d = net.input_dim();
  const Vector pre0 = net.weights0() * x;
  Scalar rhs = 0.0;
  for (Index i = 0; i < m; ++i) {
    const Scalar dn = (net.theta().segment(i * d, d) -
                       net.theta0().segment(i * d, d))
                          .norm();
    if (std::abs(pre0[i]) <= dn) rhs += dn;
  }
  rhs *= 2.0 / std::sqrt(static_cast<Scalar>(m));
  return {lhs, rhs};
}

}  // namespace conlearn
