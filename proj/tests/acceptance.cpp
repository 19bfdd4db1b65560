// Acceptance suite: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Exits nonzero if any criterion fails.

#include "conlearn/classifier.hpp"
#include "conlearn/linlab.hpp"
#include "conlearn/online.hpp"
#include "conlearn/optimizer.hpp"
#include "conlearn/problem.hpp"
#include "conlearn/scaling.hpp"
#include "conlearn/shrink.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <vector>

using namespace conlearn;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what) {
  std::printf("%s - criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
              what.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// --------------------------------------------------------------------------
// 1. analytic gradient vs central finite differences away from ReLU kinks

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1001);
  const Index m = 8, d = 6;
  Scalar worst = 0.0;
  int pairs = 0;
  while (pairs < 200) {
    TwoLayerNet net = init_net(m, d, 1.0, rng.next_u64());
    net.theta() += rng.uniform() * rng.unit_vector(m * d);
    project_theta_inplace(net);
    const Vector x = rng.uniform(0.5, 1.0) * rng.unit_vector(d);
    if ((net.weights() * x).cwiseAbs().minCoeff() <= 1e-3) continue;
    ++pairs;
    const Vector g = grad_theta(net, x);
    const Scalar h = 1e-6;
    for (Index i = 0; i < m * d; ++i) {
      TwoLayerNet plus = net, minus = net;
      plus.theta()[i] += h;
      minus.theta()[i] -= h;
      const Scalar fd = (forward(plus, x) - forward(minus, x)) / (2 * h);
      const Scalar rel =
          std::abs(fd - g[i]) / std::max(1.0, std::abs(g[i]));
      worst = std::max(worst, rel);
    }
  }
  std::ostringstream os;
  os << "gradient vs central differences on 200 kink-free pairs: max rel err "
     << worst << " (tol 1e-5), " << seconds_since(t0) << " s";
  report(1, worst < 1e-5, os.str());
}

// --------------------------------------------------------------------------
// 2. linearization error scaling in the width

void criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  ScalingExperiment exp;
  exp.m_grid = {64, 256, 1024, 4096, 16384};
  exp.D_grid = {1.0};
  exp.d = 16;
  exp.replicates = 2000;
  exp.seed = 1002;
  const auto cells = estimate_linearization_errors(exp);

  std::vector<Scalar> grid, sq_means, grad_means;
  for (const auto& c : cells) {
    grid.push_back(static_cast<Scalar>(c.m));
    sq_means.push_back(c.mean_sq_dy);
    grad_means.push_back(c.mean_grad_diff);
  }
  const ScalingFit fit_sq = fit_scaling_exponent(grid, sq_means);
  const ScalingFit fit_grad = fit_scaling_exponent(grid, grad_means);

  // exactness at the expansion point
  Rng rng(7);
  bool zero_ok = true;
  for (const Index m : exp.m_grid) {
    const TwoLayerNet net = init_net(m, exp.d, 1.0, rng.next_u64());
    for (int r = 0; r < 20; ++r) {
      const Vector x = sample_input(rng, exp.d);
      if (forward(net, x) - forward_linear(net, x) != 0.0) zero_ok = false;
    }
  }

  const bool sq_ok = fit_sq.slope >= -0.8 && fit_sq.slope <= -0.2;
  const bool grad_ok = fit_grad.slope >= -0.8 && fit_grad.slope <= -0.2;
  std::ostringstream os;
  os << "linearization scaling (d=16, D=1, 2000 samples/cell): "
     << "slope E|y-y0|^2 = " << fit_sq.slope << " (band [-0.8,-0.2] "
     << (sq_ok ? "ok" : "VIOLATED") << "), slope E|grad dy| = "
     << fit_grad.slope << " (" << (grad_ok ? "ok" : "VIOLATED")
     << "), zero at theta0 " << (zero_ok ? "exact" : "VIOLATED") << ", "
     << seconds_since(t0) << " s";
  report(2, sq_ok && grad_ok && zero_ok, os.str());
}

// --------------------------------------------------------------------------
// 3. output boundedness at initialization scale

void criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cells = estimate_output_bound({64, 1024, 16384}, 16, 2000, 10.0,
                                           1003);
  Scalar lo = std::numeric_limits<Scalar>::infinity(), hi = 0.0;
  bool markov_ok = true;
  for (const auto& c : cells) {
    lo = std::min(lo, c.mean_abs);
    hi = std::max(hi, c.mean_abs);
    const Scalar rhs =
        c.mean_abs / 10.0 + 3.0 * (c.stderr_p + c.stderr_abs / 10.0);
    if (c.p_exceed > rhs) markov_ok = false;
  }
  const bool ratio_ok = hi / lo <= 2.0;
  std::ostringstream os;
  os << "output bound: E|y| ratio across m in {2^6,2^10,2^14} = " << hi / lo
     << " (<= 2), tail Markov check " << (markov_ok ? "ok" : "VIOLATED")
     << ", " << seconds_since(t0) << " s";
  report(3, ratio_ok && markov_ok, os.str());
}

// --------------------------------------------------------------------------
// 4. online regret bound, slope, and bias plateau

void criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  QuadraticFamilyConfig base;
  base.seed = 1004;
  const std::vector<Index> grid = {64, 128, 256, 512, 1024, 2048, 4096, 8192};
  const SlopeExperimentResult res = regret_slope_experiment(base, grid, 10);
  bool bound_ok = true;
  for (size_t i = 0; i < grid.size(); ++i)
    if (res.mean_regret[i] > res.mean_bound[i]) bound_ok = false;
  const bool slope_ok = res.fit.slope >= -0.65 && res.fit.slope <= -0.35;

  auto biased = [&](Index T) {
    Scalar acc = 0.0;
    for (int s = 0; s < 10; ++s) {
      QuadraticFamilyConfig cfg = base;
      cfg.T = T;
      cfg.bias = 0.1;
      cfg.seed = base.seed + static_cast<std::uint64_t>(s);
      acc += run_quadratic_family(cfg).average_regret;
    }
    return acc / 10.0;
  };
  const Scalar r9 = biased(512), r13 = biased(8192);
  const bool plateau_ok = r13 > 0.5 * r9;

  std::ostringstream os;
  os << "regret: mean <= 1.5*sqrt(MW/T) at all T "
     << (bound_ok ? "ok" : "VIOLATED") << ", slope " << res.fit.slope
     << " in [-0.65,-0.35] " << (slope_ok ? "ok" : "VIOLATED")
     << ", bias plateau ratio " << r13 / r9 << " (> 0.5) "
     << (plateau_ok ? "ok" : "VIOLATED") << ", " << seconds_since(t0) << " s";
  report(4, bound_ok && slope_ok && plateau_ok, os.str());
}

// --------------------------------------------------------------------------
// 5. estimator unbiasedness by full enumeration

std::shared_ptr<Dataset> small_grouped_dataset(Index n, Index d,
                                               std::uint64_t seed) {
  auto ds = std::make_shared<Dataset>();
  Rng rng(seed);
  ds->features.resize(n, d);
  ds->labels.resize(n);
  ds->group.resize(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) {
    ds->features.row(i) = (0.9 * rng.uniform() * rng.unit_vector(d)).transpose();
    ds->labels[i] = (i % 2 == 0) ? 1.0 : -1.0;  // both label cells non-empty
    ds->group[static_cast<size_t>(i)] = (i % 4 < 2) ? 1 : 0;
  }
  ds->norm_scale = 1.0;
  return ds;
}

void criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  auto ds = small_grouped_dataset(24, 4, 5);
  const ConstraintProblem p =
      build_fairness_problem(ds, LossKind::CrossEntropyOnScore, 1.0, 5.0);
  TwoLayerNet net = init_net(6, 4, 5.0, 77);
  net.theta() += 0.8 * Rng(6).unit_vector(24);
  Vector lambda(6);
  lambda << 0.4, 0.2, 0.9, 0.1, 0.6, 0.3;
  GameState st{net, Vector::Zero(4), lambda, 0};
  st.xi << 0.1, -0.2, 0.3, 0.0;

  // theta estimator: enumerate the full product of sampler outcomes.
  Vector mean_theta = Vector::Zero(net.theta().size());
  {
    Index combos = 0;
    for (const Index r0 : p.samplers[0].indices)
      for (const Index r1 : p.samplers[1].indices)
        for (const Index r2 : p.samplers[2].indices)
          for (const Index r3 : p.samplers[3].indices)
            for (const Index r4 : p.samplers[4].indices) {
              IterationSamples s;
              s.theta = {{r0}, {r1}, {r2}, {r3}, {r4}};
              s.lambda = {{r1}, {r2}, {r3}, {r4}};
              mean_theta += grad_theta_lagrangian(st, p, s);
              ++combos;
            }
    mean_theta /= static_cast<Scalar>(combos);
  }
  const Vector batch = full_batch_grad_theta(p, net, lambda);
  const Scalar err_theta = (mean_theta - batch).lpNorm<Eigen::Infinity>();

  // lambda estimator: enumerate the product over the four cells (3^4 = 81).
  Vector mean_lambda = Vector::Zero(6);
  Index combos = 0;
  for (const Index r1 : p.samplers[1].indices)
    for (const Index r2 : p.samplers[2].indices)
      for (const Index r3 : p.samplers[3].indices)
        for (const Index r4 : p.samplers[4].indices) {
          IterationSamples s;
          s.theta = {{0}, {r1}, {r2}, {r3}, {r4}};
          s.lambda = {{r1}, {r2}, {r3}, {r4}};
          mean_lambda += grad_lambda(st, p, s);
          ++combos;
        }
  mean_lambda /= static_cast<Scalar>(combos);
  Vector exact_lambda(6);
  exact_lambda.head(2) = eval_outers(p, st.xi);
  exact_lambda.tail(4) = exact_rates(p, net) - st.xi;
  const Scalar err_lambda =
      (mean_lambda - exact_lambda).lpNorm<Eigen::Infinity>();

  std::ostringstream os;
  os << "estimator unbiasedness (24-row set, samplers enumerated): theta err "
     << err_theta << ", lambda err " << err_lambda << " (tol 1e-10), "
     << seconds_since(t0) << " s";
  report(5, err_theta < 1e-10 && err_lambda < 1e-10, os.str());
}

// --------------------------------------------------------------------------
// 6. shrinking LP vs brute-force basic-feasible enumeration

struct BruteForce {
  bool feasible = false;
  Scalar objective = std::numeric_limits<Scalar>::infinity();
};

BruteForce enumerate_bfs(const ShrinkInstance& inst) {
  const Index T = inst.num_snapshots();
  const Index J = inst.num_constraints();
  const Index rows = 1 + J;
  const Index cols = T + J;
  Matrix A = Matrix::Zero(rows, cols);
  A.row(0).head(T).setOnes();
  for (Index j = 0; j < J; ++j) {
    A.row(1 + j).head(T) = inst.cj.row(j);
    A(1 + j, T + j) = 1.0;
  }
  Vector b(rows);
  b[0] = 1.0;
  for (Index j = 0; j < J; ++j) b[1 + j] = inst.epsilon;

  BruteForce out;
  std::vector<Index> pick(static_cast<size_t>(rows));
  std::function<void(Index, Index)> rec = [&](Index start, Index depth) {
    if (depth == rows) {
      Matrix B(rows, rows);
      for (Index i = 0; i < rows; ++i)
        B.col(i) = A.col(pick[static_cast<size_t>(i)]);
      const Eigen::FullPivLU<Matrix> lu(B);
      if (!lu.isInvertible()) return;
      const Vector xb = lu.solve(b);
      if ((xb.array() < -1e-9).any()) return;
      Scalar obj = 0.0;
      for (Index i = 0; i < rows; ++i)
        if (pick[static_cast<size_t>(i)] < T)
          obj += inst.c0[pick[static_cast<size_t>(i)]] * xb[i];
      out.feasible = true;
      out.objective = std::min(out.objective, obj);
      return;
    }
    for (Index c = start; c < cols; ++c) {
      pick[static_cast<size_t>(depth)] = c;
      rec(c + 1, depth + 1);
    }
  };
  rec(0, 0);
  return out;
}

void criterion6() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1006);
  Scalar worst = 0.0;
  bool all_ok = true;
  Index max_nnz = 0;
  int infeasible = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Index T = 2 + rng.uniform_index(7);
    const Index J = 1 + rng.uniform_index(3);
    ShrinkInstance inst;
    inst.c0.resize(T);
    inst.cj.resize(J, T);
    for (Index t = 0; t < T; ++t) inst.c0[t] = rng.uniform(-1.0, 1.0);
    for (Index j = 0; j < J; ++j)
      for (Index t = 0; t < T; ++t) inst.cj(j, t) = rng.uniform(-1.0, 1.0);
    inst.epsilon = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.0, 0.5);

    const ShrinkResult res = shrink(inst);
    const BruteForce bf = enumerate_bfs(inst);
    if (res.feasible != bf.feasible) all_ok = false;
    if (!res.feasible) {
      ++infeasible;
      continue;
    }
    worst = std::max(worst, std::abs(res.objective - bf.objective));
    max_nnz = std::max(max_nnz, res.nnz);
    if (res.nnz > J + 1) all_ok = false;
  }
  std::ostringstream os;
  os << "shrinking LP vs enumeration (500 instances, " << infeasible
     << " infeasible matched): max objective gap " << worst
     << " (tol 1e-8), nnz <= J+1 held, " << seconds_since(t0) << " s";
  report(6, all_ok && worst < 1e-8, os.str());
}

// --------------------------------------------------------------------------
// 7-9. end-to-end fairness training, kappa sweep, shrink preservation

struct FairnessRun {
  std::shared_ptr<Dataset> data;
  TwoLayerNet skeleton;
  RunResult result;
  EvalReport tstoch;
};

OptimizerConfig fairness_optimizer(std::uint64_t seed) {
  OptimizerConfig cfg;
  cfg.T = 20000;
  cfg.seed = seed;
  cfg.log_every = 2000;
  cfg.burn_in = 1000;
  cfg.batch_size = 1;
  cfg.step_scale = 1.5;
  return cfg;
}

FairnessRun run_fairness(const std::shared_ptr<Dataset>& data, Scalar kappa,
                         std::uint64_t seed) {
  const ConstraintProblem p =
      build_fairness_problem(data, LossKind::CrossEntropyOnScore, kappa, 10.0);
  TwoLayerNet net = init_net(256, 8, 10.0, 7);
  RunResult res = run(p, net, fairness_optimizer(seed));
  const Index S = static_cast<Index>(res.snapshots.size());
  const StochasticClassifier clf(
      net, res.snapshots, Vector::Constant(S, 1.0 / static_cast<Scalar>(S)));
  EvalReport rep = evaluate_mixture(clf, *data, "T-Stoch");
  return FairnessRun{data, std::move(net), std::move(res), std::move(rep)};
}

EvalReport run_unconstrained(const std::shared_ptr<Dataset>& data,
                             std::uint64_t seed) {
  const ConstraintProblem p = build_unconstrained_problem(
      data, LossKind::CrossEntropyOnScore, 1.0, 10.0);
  TwoLayerNet net = init_net(256, 8, 10.0, 7);
  const RunResult res = run(p, net, fairness_optimizer(seed));
  return evaluate_single(net, res.last_theta, *data, "Unconstrained");
}

void criteria789() {
  const auto t0 = std::chrono::steady_clock::now();
  auto data = std::make_shared<Dataset>(generate_biased_synthetic(2000, 8, 0.8, 42));

  // criterion 7
  const EvalReport base = run_unconstrained(data, 11);
  FairnessRun fair = run_fairness(data, 1.0, 11);
  const Scalar base_gap = base.recall_gap();
  const Scalar fair_gap = fair.tstoch.recall_gap();
  const bool gap_ok = fair_gap <= 0.5 * base_gap;
  const bool acc_ok = std::abs(fair.tstoch.accuracy - base.accuracy) <= 0.05;
  {
    std::ostringstream os;
    os << "fairness training: unconstrained gap " << base_gap
       << " (acc " << base.accuracy << ") -> T-Stoch gap " << fair_gap
       << " (acc " << fair.tstoch.accuracy << "); need gap <= "
       << 0.5 * base_gap << " and |acc diff| <= 0.05, "
       << seconds_since(t0) << " s";
    report(7, gap_ok && acc_ok, os.str());
  }

  // criterion 8: kappa sweep with shared seeds
  const auto t8 = std::chrono::steady_clock::now();
  const std::vector<Scalar> kappas = {0.5, 1.0, 2.0, 4.0};
  const std::vector<std::uint64_t> seeds = {11, 12, 13, 14, 15};
  std::vector<Scalar> means, ses;
  for (const Scalar kappa : kappas) {
    std::vector<Scalar> feas;
    for (const std::uint64_t seed : seeds) {
      const ConstraintProblem p = build_fairness_problem(
          data, LossKind::CrossEntropyOnScore, kappa, 10.0);
      TwoLayerNet net = init_net(256, 8, 10.0, 7);
      const RunResult res = run(p, net, fairness_optimizer(seed));
      feas.push_back(eval_outers(p, res.trace.average_rates()).maxCoeff());
    }
    Scalar mean = 0.0;
    for (const Scalar v : feas) mean += v;
    mean /= static_cast<Scalar>(feas.size());
    Scalar var = 0.0;
    for (const Scalar v : feas) var += (v - mean) * (v - mean);
    ses.push_back(std::sqrt(var / static_cast<Scalar>(feas.size() - 1) /
                            static_cast<Scalar>(feas.size())));
    means.push_back(mean);
  }
  int inversions = 0;
  bool within = true;
  for (size_t i = 1; i < means.size(); ++i) {
    if (means[i] > means[i - 1]) {
      ++inversions;
      if (means[i] - means[i - 1] > std::max(ses[i], ses[i - 1]))
        within = false;
    }
  }
  {
    std::ostringstream os;
    os << "kappa sweep max_j g_j(avg rates): ";
    for (size_t i = 0; i < means.size(); ++i)
      os << "k=" << kappas[i] << ": " << means[i] << "+-" << ses[i] << "  ";
    os << "(" << inversions << " inversion(s)), " << seconds_since(t8) << " s";
    report(8, inversions <= 1 && within, os.str());
  }

  // criterion 9: shrink the criterion-7 bundle
  const auto t9 = std::chrono::steady_clock::now();
  const ConstraintProblem p =
      build_fairness_problem(data, LossKind::CrossEntropyOnScore, 1.0, 10.0);
  const ShrinkInstance inst = build_shrink_instance(
      p, fair.skeleton, fair.result.snapshots, std::nullopt);
  const ShrinkResult shrunk = shrink(inst);
  bool c9 = shrunk.feasible && shrunk.nnz <= 3;
  Scalar jgap = 0.0, jacc = 0.0;
  if (shrunk.feasible) {
    const StochasticClassifier jclf(fair.skeleton, fair.result.snapshots,
                                    shrunk.p);
    const EvalReport jrep = evaluate_mixture(jclf, *data, "J-Stoch");
    jgap = jrep.recall_gap();
    jacc = jrep.accuracy;
    c9 = c9 && std::abs(jgap - fair.tstoch.recall_gap()) <= 0.03 &&
         std::abs(jacc - fair.tstoch.accuracy) <= 0.03;
  }
  {
    std::ostringstream os;
    os << "shrink preservation: nnz " << shrunk.nnz << " (<= 3), J-Stoch gap "
       << jgap << " vs T-Stoch " << fair.tstoch.recall_gap() << ", acc "
       << jacc << " vs " << fair.tstoch.accuracy << " (tol 0.03), "
       << seconds_since(t9) << " s";
    report(9, c9, os.str());
  }
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criteria789();
  std::printf("acceptance: %d criterion(s) failed, total %.1f s\n", failures,
              seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
