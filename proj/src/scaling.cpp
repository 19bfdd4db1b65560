#include "conlearn/scaling.hpp"

#include "conlearn/rng.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace conlearn {
namespace {

// Returns (slope, intercept) of y on x.
std::pair<Scalar, Scalar> ols(const std::vector<Scalar>& x,
                              const std::vector<Scalar>& y) {
  const Scalar n = static_cast<Scalar>(x.size());
  const Scalar mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const Scalar my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  Scalar sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const Scalar slope = sxy / sxx;
  return {slope, my - slope * mx};
}

std::vector<Scalar> log_means(const std::vector<Scalar>& grid,
                              const std::vector<Scalar>& means) {
  require(grid.size() == means.size(), "grid/means size mismatch");
  if (grid.size() < 3)
    throw std::invalid_argument("need >= 3 grid points for a scaling fit");
  std::vector<Scalar> out(means.size());
  for (size_t i = 0; i < means.size(); ++i) {
    if (!(means[i] > 0.0))
      throw std::domain_error("non-positive mean at grid point " +
                              std::to_string(grid[i]) + "; cannot take log");
    out[i] = std::log(means[i]);
  }
  return out;
}

}  // namespace

ScalingFit fit_scaling_exponent(const std::vector<Scalar>& grid,
                                const std::vector<Scalar>& means) {
  const std::vector<Scalar> ly = log_means(grid, means);
  std::vector<Scalar> lx(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) lx[i] = std::log(grid[i]);
  const auto [slope, intercept] = ols(lx, ly);

  // Residual-based slope stderr.
  Scalar sse = 0.0, sxx = 0.0;
  const Scalar mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<Scalar>(lx.size());
  for (size_t i = 0; i < lx.size(); ++i) {
    const Scalar r = ly[i] - (intercept + slope * lx[i]);
    sse += r * r;
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  ScalingFit fit;
  fit.slope = slope;
  fit.intercept = intercept;
  const size_t dof = lx.size() > 2 ? lx.size() - 2 : 1;
  fit.stderr_slope = std::sqrt(sse / static_cast<Scalar>(dof) / sxx);
  return fit;
}

ScalingFit fit_scaling_exponent_bootstrap(
    const std::vector<Scalar>& grid,
    const std::vector<std::vector<Scalar>>& samples_per_cell, int bootstrap,
    std::uint64_t seed) {
  require(grid.size() == samples_per_cell.size(), "grid/cell size mismatch");
  std::vector<Scalar> means(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    const auto& cell = samples_per_cell[i];
    require(!cell.empty(), "empty replicate cell");
    means[i] = std::accumulate(cell.begin(), cell.end(), 0.0) /
               static_cast<Scalar>(cell.size());
  }
  ScalingFit fit = fit_scaling_exponent(grid, means);

  Rng rng(seed);
  Scalar acc = 0.0, acc2 = 0.0;
  int done = 0;
  for (int b = 0; b < bootstrap; ++b) {
    std::vector<Scalar> bm(grid.size());
    bool ok = true;
    for (size_t i = 0; i < grid.size(); ++i) {
      const auto& cell = samples_per_cell[i];
      Scalar s = 0.0;
      for (size_t r = 0; r < cell.size(); ++r)
        s += cell[static_cast<size_t>(rng.uniform_index(static_cast<Index>(cell.size())))];
      bm[i] = s / static_cast<Scalar>(cell.size());
      if (!(bm[i] > 0.0)) ok = false;
    }
    if (!ok) continue;
    const Scalar sl = fit_scaling_exponent(grid, bm).slope;
    acc += sl;
    acc2 += sl * sl;
    ++done;
  }
  if (done > 1) {
    const Scalar mean = acc / done;
    fit.stderr_slope = std::sqrt(std::max(0.0, acc2 / done - mean * mean));
  }
  return fit;
}

}  // namespace conlearn
