#include "conlearn/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace conlearn {
namespace {

Scalar max_lipschitz(const ConstraintProblem& p) {
  Scalar L = p.objective.lipschitz;
  for (const auto& s : p.surrogates) L = std::max(L, s.lipschitz);
  for (const auto& g : p.outers) L = std::max(L, g.lipschitz);
  return L;
}

Scalar sample_row(const ConstraintProblem& p, const TwoLayerNet& net,
                  const ScalarLoss& loss, Index row, Scalar& y_out) {
  y_out = forward(net, p.dataset->features.row(row).transpose());
  return eval_loss_grad(loss, y_out, sgn(p.dataset->labels[row]));
}

}  // namespace

StepSizes default_step_sizes(const ConstraintProblem& problem, Index T) {
  require(T >= 1, "T must be >= 1");
  const Scalar L = max_lipschitz(problem);
  const Scalar C = std::max(
      1.0, problem.xi_bound.size() > 0 ? problem.xi_bound.maxCoeff() : 1.0);
  const Scalar K = std::max<Scalar>(1.0, static_cast<Scalar>(problem.num_metrics()));
  const Scalar J = std::max<Scalar>(1.0, static_cast<Scalar>(problem.num_outers()));
  const Scalar kappa = problem.kappa;
  const Scalar D = problem.radius;
  const Scalar Tf = static_cast<Scalar>(T);
  StepSizes s;
  s.eta_theta = std::sqrt(D * D / (4.0 * kappa * K * L * Tf));
  s.eta_xi = std::sqrt(C / (2.0 * Tf * kappa * J * L * std::sqrt(K)));
  s.eta_lambda = std::sqrt(kappa / (2.0 * L * C * std::sqrt(K) * std::sqrt(J) * Tf));
  return s;
}

GameState initial_state(const ConstraintProblem& problem, TwoLayerNet net) {
  require(net.input_dim() == problem.dataset->dim(), "model/dataset dim mismatch");
  require(net.radius() == problem.radius, "model radius != problem radius");
  GameState st{std::move(net), Vector::Zero(problem.num_metrics()),
               Vector::Zero(problem.num_outers() + problem.num_metrics()), 0};
  return st;
}

IterationSamples draw_samples(const ConstraintProblem& problem,
                              std::vector<Rng>& theta_streams,
                              std::vector<Rng>& lambda_streams, Index batch) {
  const Index K = problem.num_metrics();
  IterationSamples s;
  s.theta.resize(static_cast<size_t>(K) + 1);
  s.lambda.resize(static_cast<size_t>(K));
  for (Index k = 0; k <= K; ++k) {
    auto& rows = s.theta[static_cast<size_t>(k)];
    rows.resize(static_cast<size_t>(batch));
    for (Index b = 0; b < batch; ++b)
      rows[static_cast<size_t>(b)] =
          problem.samplers[static_cast<size_t>(k)].sample(theta_streams[static_cast<size_t>(k)]);
  }
  for (Index k = 1; k <= K; ++k) {
    auto& rows = s.lambda[static_cast<size_t>(k - 1)];
    rows.resize(static_cast<size_t>(batch));
    for (Index b = 0; b < batch; ++b)
      rows[static_cast<size_t>(b)] =
          problem.samplers[static_cast<size_t>(k)].sample(lambda_streams[static_cast<size_t>(k - 1)]);
  }
  return s;
}

Vector grad_theta_lagrangian(const GameState& state,
                             const ConstraintProblem& problem,
                             const IterationSamples& samples) {
  const Index K = problem.num_metrics();
  const Index J = problem.num_outers();
  const TwoLayerNet& net = state.net;
  Vector grad = Vector::Zero(net.theta().size());
  const Scalar inv_batch =
      1.0 / static_cast<Scalar>(samples.theta[0].size());
  Scalar y = 0.0;
  for (const Index row : samples.theta[0]) {
    const Scalar coef = sample_row(problem, net, problem.objective, row, y);
    if (coef != 0.0)
      grad += (coef * inv_batch) *
              grad_theta(net, problem.dataset->features.row(row).transpose());
  }
  for (Index k = 1; k <= K; ++k) {
    const Scalar lam = state.lambda[J + k - 1];
    if (lam == 0.0) continue;
    for (const Index row : samples.theta[static_cast<size_t>(k)]) {
      const Scalar coef =
          sample_row(problem, net, problem.surrogates[static_cast<size_t>(k - 1)], row, y);
      if (coef != 0.0)
        grad += (lam * coef * inv_batch) *
                grad_theta(net, problem.dataset->features.row(row).transpose());
    }
  }
  return grad;
}

Vector grad_xi(const GameState& state, const ConstraintProblem& problem) {
  const Index K = problem.num_metrics();
  const Index J = problem.num_outers();
  Vector g = Vector::Zero(K);
  for (Index j = 0; j < J; ++j) {
    const Scalar lam = state.lambda[j];
    if (lam == 0.0) continue;
    g += lam * eval_outer_grad(problem.outers[static_cast<size_t>(j)], state.xi);
  }
  g -= state.lambda.tail(K);
  return g;
}

Vector grad_lambda(const GameState& state, const ConstraintProblem& problem,
                   const IterationSamples& samples) {
  const Index K = problem.num_metrics();
  const Index J = problem.num_outers();
  Vector g(J + K);
  for (Index j = 0; j < J; ++j)
    g[j] = eval_outer(problem.outers[static_cast<size_t>(j)], state.xi);
  for (Index k = 1; k <= K; ++k) {
    Scalar acc = 0.0;
    const auto& rows = samples.lambda[static_cast<size_t>(k - 1)];
    for (const Index row : rows) {
      const Scalar y = forward(state.net, problem.dataset->features.row(row).transpose());
      acc += eval_loss(problem.metrics[static_cast<size_t>(k - 1)], y,
                       sgn(problem.dataset->labels[row]));
    }
    g[J + k - 1] = acc / static_cast<Scalar>(rows.size()) - state.xi[k - 1];
  }
  return g;
}

PlayerGradients compute_gradients(const GameState& state,
                                  const ConstraintProblem& problem,
                                  const IterationSamples& samples) {
  PlayerGradients grads;
  grads.theta = grad_theta_lagrangian(state, problem, samples);
  grads.xi = grad_xi(state, problem);
  grads.lambda = grad_lambda(state, problem, samples);
  return grads;
}

void apply_updates(GameState& state, const ConstraintProblem& problem,
                   const PlayerGradients& grads, const StepSizes& steps) {
  state.net.theta() -= steps.eta_theta * grads.theta;
  project_theta_inplace(state.net);
  state.xi -= steps.eta_xi * grads.xi;
  clamp_xi_inplace(problem, state.xi);
  state.lambda += steps.eta_lambda * grads.lambda;
  clamp_lambda_inplace(problem, state.lambda);
  ++state.t;
}

Vector full_batch_grad_theta(const ConstraintProblem& problem,
                             const TwoLayerNet& net, const Vector& lambda) {
  const Index K = problem.num_metrics();
  const Index J = problem.num_outers();
  Vector grad = Vector::Zero(net.theta().size());
  Scalar y = 0.0;
  const auto& d0 = problem.samplers[0];
  for (const Index row : d0.indices) {
    const Scalar coef = sample_row(problem, net, problem.objective, row, y);
    if (coef != 0.0)
      grad += (coef / static_cast<Scalar>(d0.size())) *
              grad_theta(net, problem.dataset->features.row(row).transpose());
  }
  for (Index k = 1; k <= K; ++k) {
    const Scalar lam = lambda[J + k - 1];
    if (lam == 0.0) continue;
    const auto& dk = problem.samplers[static_cast<size_t>(k)];
    for (const Index row : dk.indices) {
      const Scalar coef =
          sample_row(problem, net, problem.surrogates[static_cast<size_t>(k - 1)], row, y);
      if (coef != 0.0)
        grad += (lam * coef / static_cast<Scalar>(dk.size())) *
                grad_theta(net, problem.dataset->features.row(row).transpose());
    }
  }
  return grad;
}

Scalar exact_lagrangian(const ConstraintProblem& problem, const TwoLayerNet& net,
                        const Vector& xi, const Vector& lambda) {
  const Index K = problem.num_metrics();
  const Index J = problem.num_outers();
  Scalar L = exact_objective(problem, net);
  for (Index j = 0; j < J; ++j)
    L += lambda[j] * eval_outer(problem.outers[static_cast<size_t>(j)], xi);
  const Vector rates = exact_rates(problem, net);
  for (Index k = 0; k < K; ++k)
    L += lambda[J + k] * (rates[k] - xi[k]);
  return L;
}

Vector MetricsTrace::average_rates() const {
  if (rows.empty()) return Vector(0);
  Vector acc = Vector::Zero(rows.front().rates.size());
  for (const auto& r : rows) acc += r.rates;
  return acc / static_cast<Scalar>(rows.size());
}

Scalar MetricsTrace::average_objective() const {
  Scalar acc = 0.0;
  for (const auto& r : rows) acc += r.objective;
  return rows.empty() ? 0.0 : acc / static_cast<Scalar>(rows.size());
}

RunResult run(const ConstraintProblem& problem, TwoLayerNet net,
              const OptimizerConfig& config) {
  require(config.T >= 0, "T must be >= 0");
  require(config.batch_size >= 1, "batch size must be >= 1");
  problem.validate();

  const Index K = problem.num_metrics();
  const Index log_every =
      config.log_every > 0 ? config.log_every : problem.dataset->rows();

  StepSizes steps = config.step_overrides
                        ? *config.step_overrides
                        : default_step_sizes(problem, std::max<Index>(config.T, 1));
  steps.eta_theta *= config.step_scale;
  steps.eta_xi *= config.step_scale;
  steps.eta_lambda *= config.step_scale;

  // Independent streams per sampler and player.
  std::vector<Rng> theta_streams, lambda_streams;
  for (Index k = 0; k <= K; ++k)
    theta_streams.push_back(Rng::stream(config.seed, static_cast<std::uint64_t>(k)));
  for (Index k = 1; k <= K; ++k)
    lambda_streams.push_back(
        Rng::stream(config.seed, 1000 + static_cast<std::uint64_t>(k)));

  RunResult out;
  out.steps = steps;
  GameState state = initial_state(problem, std::move(net));

  auto log_state = [&](Index t) {
    TraceRow row;
    row.t = t;
    row.objective = exact_objective(problem, state.net);
    row.rates = exact_rates(problem, state.net);
    row.g_of_xi = eval_outers(problem, state.xi);
    row.g_of_rates = eval_outers(problem, row.rates);
    row.lambda = state.lambda;
    row.theta_dist = state.net.dist_from_init();
    out.trace.rows.push_back(std::move(row));
    out.snapshots.push_back(state.net.theta());
    out.snapshot_ts.push_back(t);
  };

  for (Index t = 1; t <= config.T; ++t) {
    const IterationSamples samples =
        draw_samples(problem, theta_streams, lambda_streams, config.batch_size);
    const PlayerGradients grads = compute_gradients(state, problem, samples);
    if (!grads.theta.allFinite() || !grads.xi.allFinite() ||
        !grads.lambda.allFinite())
      throw TrainingError("non-finite gradient at iteration " + std::to_string(t),
                          out.trace);
    apply_updates(state, problem, grads, steps);
    if (t > config.burn_in && t % log_every == 0) log_state(t);
  }

  out.last_theta = state.net.theta();
  if (out.snapshots.empty() && config.T >= 0) {
    // Degenerate schedule (e.g. T <= burn_in): fall back to the final weights
    // so downstream consumers always see one snapshot.
    if (config.T > 0) log_state(config.T);
  }
  Index best = 0;
  for (size_t i = 1; i < out.trace.rows.size(); ++i)
    if (out.trace.rows[i].objective < out.trace.rows[static_cast<size_t>(best)].objective)
      best = static_cast<Index>(i);
  out.best_index = best;
  out.final_xi = state.xi;
  out.final_lambda = state.lambda;
  return out;
}

}  // namespace conlearn
