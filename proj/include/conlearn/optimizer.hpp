#pragma once

#include "conlearn/problem.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace conlearn {

/// Step sizes for the three players. Defaults implement the tuned rates
///   eta_theta  = sqrt(D^2 / (4 kappa K L T)),
///   eta_xi     = sqrt(C / (2 T kappa J L sqrt(K))),
///   eta_lambda = sqrt(kappa / (2 L C sqrt(K) sqrt(J) T)),
/// with L = max registered Lipschitz constant, C = max Xi bound, and K, J
/// floored at 1 so degenerate (unconstrained) problems stay defined.
struct StepSizes {
  Scalar eta_theta = 0.0;
  Scalar eta_xi = 0.0;
  Scalar eta_lambda = 0.0;
};

StepSizes default_step_sizes(const ConstraintProblem& problem, Index T);

struct OptimizerConfig {
  Index T = 1000;
  std::uint64_t seed = 0;
  Index log_every = 0;  // 0 -> dataset size (one epoch)
  Index burn_in = 1000;
  Index batch_size = 1;
  std::optional<StepSizes> step_overrides;
  Scalar step_scale = 1.0;  // multiplies whatever steps are in effect
};

/// The minimax iterate (theta, xi, lambda); all three live in their boxes/ball
/// after every step.
struct GameState {
  TwoLayerNet net;
  Vector xi;
  Vector lambda;
  Index t = 0;
};

GameState initial_state(const ConstraintProblem& problem, TwoLayerNet net);

/// One iteration's worth of sampled row indices. The lambda player draws its
/// own fresh samples, independent of the theta player's.
struct IterationSamples {
  std::vector<std::vector<Index>> theta;   // K+1 entries: D0 then D1..DK
  std::vector<std::vector<Index>> lambda;  // K entries: D1..DK
};

IterationSamples draw_samples(const ConstraintProblem& problem,
                              std::vector<Rng>& theta_streams,
                              std::vector<Rng>& lambda_streams, Index batch);

/// Stochastic gradient of the surrogate Lagrangian w.r.t. theta:
///   grad h0(y(theta; x0), z0) + sum_k lambda_{J+k} grad surrogate_k(y(theta; x_k), z_k),
/// chained through the network gradient; batches average i.i.d. single-sample
/// estimators. Uses surrogates only, never the raw metrics.
Vector grad_theta_lagrangian(const GameState& state,
                             const ConstraintProblem& problem,
                             const IterationSamples& samples);

/// Exact gradient of L1 w.r.t. xi: coordinate k is
/// sum_j lambda_j d g_j / d xi_k - lambda_{J+k}. No sampling involved.
Vector grad_xi(const GameState& state, const ConstraintProblem& problem);

/// Stochastic gradient of L w.r.t. lambda: (g_1(xi), ..., g_J(xi),
/// h_1(y; z) - xi_1, ...). The first J coordinates are exact; the last K use
/// the ORIGINAL metrics on fresh samples.
Vector grad_lambda(const GameState& state, const ConstraintProblem& problem,
                   const IterationSamples& samples);

struct PlayerGradients {
  Vector theta;
  Vector xi;
  Vector lambda;
};

PlayerGradients compute_gradients(const GameState& state,
                                  const ConstraintProblem& problem,
                                  const IterationSamples& samples);

/// Simultaneous update: all three gradients must have been evaluated at the
/// incoming state. Applies the descent/descent/ascent steps and all three
/// projections; the three updates commute.
void apply_updates(GameState& state, const ConstraintProblem& problem,
                   const PlayerGradients& grads, const StepSizes& steps);

/// Full-batch gradient of the surrogate Lagrangian (every sampler enumerated);
/// the deterministic counterpart of grad_theta_lagrangian.
Vector full_batch_grad_theta(const ConstraintProblem& problem,
                             const TwoLayerNet& net, const Vector& lambda);

/// Exact Lagrangian L(theta, xi, lambda) with population rates.
Scalar exact_lagrangian(const ConstraintProblem& problem, const TwoLayerNet& net,
                        const Vector& xi, const Vector& lambda);

struct TraceRow {
  Index t = 0;
  Scalar objective = 0.0;   // exact r_0(theta^t)
  Vector rates;             // exact r_k(theta^t)
  Vector g_of_xi;           // g_j(xi^t)
  Vector g_of_rates;        // g_j(r(theta^t))
  Vector lambda;
  Scalar theta_dist = 0.0;  // ||theta^t - theta^0||
};

struct MetricsTrace {
  std::vector<TraceRow> rows;

  /// Arithmetic mean of the logged exact rates / objectives (the long-run
  /// averages; recomputable from the rows).
  Vector average_rates() const;
  Scalar average_objective() const;
};

struct RunResult {
  std::vector<Vector> snapshots;  // theta at each log point after burn-in
  std::vector<Index> snapshot_ts;
  Vector last_theta;              // theta^T
  Index best_index = 0;           // argmin exact objective among snapshots
  MetricsTrace trace;
  StepSizes steps;
  Vector final_xi;
  Vector final_lambda;
};

/// Overflow aborts carry the partial trace for post-mortems.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, MetricsTrace trace)
      : std::runtime_error(what), trace(std::move(trace)) {}
  MetricsTrace trace;
};

/// Algorithm: for t = 1..T draw fresh samples, evaluate all three gradients at
/// (theta^t, xi^t, lambda^t), then apply the projected simultaneous update.
/// Deterministic given the seed. Snapshots record theta every `log_every`
/// iterations once t > burn_in.
RunResult run(const ConstraintProblem& problem, TwoLayerNet net,
              const OptimizerConfig& config);

}  // namespace conlearn
