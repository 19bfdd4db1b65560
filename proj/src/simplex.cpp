#include "conlearn/simplex.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace conlearn {
namespace {

constexpr Scalar kPivotTol = 1e-11;
constexpr Scalar kCostTol = 1e-9;

// Tableau with one artificial per row; basis starts as the artificials.
struct Tableau {
  Matrix t;                  // rows x (n + m + 1); last column is b
  std::vector<Index> basis;  // basic variable per row
  Index n = 0;               // structural variables
  Index m = 0;               // rows

  Scalar& rhs(Index i) { return t(i, n + m); }

  void pivot(Index row, Index col) {
    t.row(row) /= t(row, col);
    for (Index i = 0; i < m; ++i) {
      if (i == row) continue;
      const Scalar f = t(i, col);
      if (f != 0.0) t.row(i) -= f * t.row(row);
    }
    basis[static_cast<size_t>(row)] = col;
  }
};

// Bland's rule: entering = lowest-index variable with reduced cost < -tol,
// leaving = lowest-index basic variable among the minimal ratios.
// Returns false when the current basis is optimal for `cost`.
// allow(col) filters the entering candidates (used to bar artificials).
template <typename Allow>
LpStatus run_simplex(Tableau& tb, const Vector& cost, const Allow& allow) {
  const Index width = tb.n + tb.m;
  for (int iter = 0;; ++iter) {
    if (iter > 50000) throw std::runtime_error("simplex failed to terminate");
    // reduced costs: c_j - c_B^T T_j
    Vector cb(tb.m);
    for (Index i = 0; i < tb.m; ++i) cb[i] = cost[tb.basis[static_cast<size_t>(i)]];
    Index entering = -1;
    for (Index j = 0; j < width; ++j) {
      if (!allow(j)) continue;
      const Scalar rc = cost[j] - cb.dot(tb.t.col(j));
      if (rc < -kCostTol) {
        entering = j;
        break;
      }
    }
    if (entering < 0) return LpStatus::Optimal;

    Index leaving = -1;
    Scalar best_ratio = std::numeric_limits<Scalar>::infinity();
    for (Index i = 0; i < tb.m; ++i) {
      const Scalar a = tb.t(i, entering);
      if (a > kPivotTol) {
        const Scalar ratio = tb.rhs(i) / a;
        if (ratio < best_ratio - kPivotTol ||
            (ratio < best_ratio + kPivotTol &&
             (leaving < 0 || tb.basis[static_cast<size_t>(i)] <
                                 tb.basis[static_cast<size_t>(leaving)]))) {
          best_ratio = ratio;
          leaving = i;
        }
      }
    }
    if (leaving < 0) return LpStatus::Unbounded;
    tb.pivot(leaving, entering);
  }
}

}  // namespace

LpSolution solve_lp(const Matrix& A, const Vector& b, const Vector& c) {
  const Index m = A.rows();
  const Index n = A.cols();
  require(b.size() == m && c.size() == n, "LP dimension mismatch");

  Tableau tb;
  tb.n = n;
  tb.m = m;
  tb.t.resize(m, n + m + 1);
  tb.t.leftCols(n) = A;
  tb.t.middleCols(n, m) = Matrix::Identity(m, m);
  tb.t.col(n + m) = b;
  for (Index i = 0; i < m; ++i) {
    if (tb.rhs(i) < 0.0) tb.t.row(i) = -tb.t.row(i);
    tb.basis.push_back(n + i);
  }

  // Phase 1: minimize the artificial sum.
  Vector phase1 = Vector::Zero(n + m);
  phase1.tail(m).setOnes();
  run_simplex(tb, phase1, [](Index) { return true; });
  Scalar art_sum = 0.0;
  for (Index i = 0; i < m; ++i)
    if (tb.basis[static_cast<size_t>(i)] >= n) art_sum += tb.rhs(i);
  if (art_sum > 1e-8) {
    LpSolution sol;
    sol.status = LpStatus::Infeasible;
    return sol;
  }
  // Drive residual artificials (at value 0) out of the basis where possible.
  for (Index i = 0; i < m; ++i) {
    if (tb.basis[static_cast<size_t>(i)] < n) continue;
    for (Index j = 0; j < n; ++j) {
      if (std::abs(tb.t(i, j)) > kPivotTol) {
        tb.pivot(i, j);
        break;
      }
    }
  }

  // Phase 2 over structural variables only.
  Vector phase2 = Vector::Zero(n + m);
  phase2.head(n) = c;
  const Index nn = n;
  const auto& basis = tb.basis;
  const LpStatus status = run_simplex(tb, phase2, [&](Index j) {
    if (j >= nn) return false;  // artificials stay out
    (void)basis;
    return true;
  });

  LpSolution sol;
  sol.status = status;
  if (status == LpStatus::Unbounded) return sol;
  sol.x = Vector::Zero(n);
  for (Index i = 0; i < m; ++i) {
    const Index v = tb.basis[static_cast<size_t>(i)];
    if (v < n) sol.x[v] = tb.rhs(i);
  }
  sol.objective = c.dot(sol.x);
  sol.status = LpStatus::Optimal;
  return sol;
}

}  // namespace conlearn
