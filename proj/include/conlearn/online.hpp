#pragma once

#include "conlearn/rng.hpp"
#include "conlearn/scaling.hpp"
#include "conlearn/types.hpp"

#include <functional>
#include <vector>

namespace conlearn {

/// Convex domain descriptor with Euclidean projection (ball or box).
struct Domain {
  enum class Kind { Ball, Box } kind = Kind::Ball;
  Vector center;  // ball
  Scalar radius = 1.0;
  Vector lo, hi;  // box

  static Domain ball(Vector center, Scalar radius);
  static Domain box(Vector lo, Vector hi);
  Vector project(const Vector& v) const;
  bool contains(const Vector& v, Scalar tol = 1e-9) const;
};

/// Mirror map via its gradient pair (grad h, grad h*). Only the Euclidean map
/// h(theta) = 0.5 ||theta - anchor||^2 ships; for it the mirror step reduces
/// exactly to a projected gradient step, which is what the Bregman projection
/// below implements. Alternative maps plug into the same interface but would
/// need their own projection.
struct MirrorMap {
  std::function<Vector(const Vector&)> grad;
  std::function<Vector(const Vector&)> grad_conjugate;

  static MirrorMap euclidean(Vector anchor);
};

/// zeta = grad h*(grad h(theta) - eta mu), then the domain projection.
Vector omd_step(const MirrorMap& map, const Domain& domain, const Vector& theta,
                const Vector& mu, Scalar eta);

/// Realized per-round losses plus the loss closures, so any comparator can be
/// evaluated in hindsight.
struct RegretLedger {
  std::vector<std::function<Scalar(const Vector&)>> losses;
  std::vector<Scalar> realized;

  void record(std::function<Scalar(const Vector&)> loss, const Vector& theta_t);
  Scalar average_loss_at(const Vector& theta) const;
  Scalar average_realized() const;
};

struct RegretMeasurement {
  Scalar average_regret = 0.0;
  Vector comparator;
};

/// avg realized - avg loss at the comparator returned by `solver`.
RegretMeasurement measure_regret(
    const RegretLedger& ledger,
    const std::function<Vector(const RegretLedger&)>& solver);

/// Multi-restart projected gradient descent on the averaged loss; the generic
/// comparator for families without a closed form (reported as approximate).
Vector batch_comparator(const RegretLedger& ledger, const Domain& domain,
                        const std::function<Vector(const Vector&)>& avg_grad,
                        int restarts, int iters, Scalar eta, Rng& rng);

// ---------------------------------------------------------------------------

/// Synthetic quadratic online family: f_t(theta) = alpha/2 ||theta - c_t||^2,
/// c_t uniform in a ball; stochastic gradients carry spherical noise and an
/// optional constant bias injector. Step eta = sqrt(M/(W T)) with
/// M = sup h = R^2/2 and W = sup ||mu||; the closed-form comparator is the
/// mean of the c_t.
struct QuadraticFamilyConfig {
  Index dim = 10;
  Scalar domain_radius = 2.0;
  Scalar center_radius = 1.0;
  Scalar alpha = 0.5;
  Scalar noise = 0.25;
  Scalar bias = 0.0;
  Index T = 1024;
  std::uint64_t seed = 0;
};

struct FamilyRun {
  Scalar average_regret = 0.0;
  Scalar M = 0.0;
  Scalar W = 0.0;
  Scalar regret_bound = 0.0;  // 1.5 sqrt(M W / T)
};

FamilyRun run_quadratic_family(const QuadraticFamilyConfig& cfg);

/// Online classification with the two-layer net and cross-entropy rounds
/// (one fresh sample per round), trained by stochastic projected gradient
/// descent; comparator via multi-restart batch descent on the averaged loss
/// and therefore a lower-bound caveat on the regret.
struct NeuralFamilyConfig {
  Index m = 256;
  Index d = 8;
  Scalar radius = 5.0;
  Index T = 512;
  Index data_n = 512;
  std::uint64_t seed = 0;
};

FamilyRun run_neural_family(const NeuralFamilyConfig& cfg);

struct SlopeExperimentResult {
  std::vector<Index> grid;
  std::vector<Scalar> mean_regret;
  std::vector<Scalar> stderr_regret;
  std::vector<Scalar> mean_bound;
  ScalingFit fit;
};

/// Mean regret per horizon over seeds and the fitted log-log exponent.
SlopeExperimentResult regret_slope_experiment(
    const QuadraticFamilyConfig& base, const std::vector<Index>& T_grid,
    int seeds);

}  // namespace conlearn
