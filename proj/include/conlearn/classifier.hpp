#pragma once

#include "conlearn/data.hpp"
#include "conlearn/model.hpp"
#include "conlearn/rng.hpp"

#include <string>
#include <vector>

namespace conlearn {

/// Randomized predictor over parameter snapshots: draw i ~ categorical(p),
/// answer y(theta^i; x). All snapshots share one model skeleton (m, d, D, b,
/// theta0) and satisfy ||theta^i - theta0|| <= D.
class StochasticClassifier {
 public:
  StochasticClassifier(TwoLayerNet skeleton, std::vector<Vector> snapshots,
                       Vector probs);

  Index num_snapshots() const { return static_cast<Index>(snapshots_.size()); }
  const Vector& probs() const { return probs_; }
  const std::vector<Vector>& snapshots() const { return snapshots_; }
  const TwoLayerNet& skeleton() const { return skeleton_; }

  /// Snapshot draw via CDF inversion; callers own the stream.
  Index draw_index(Rng& rng) const;

  Scalar predict(const VecRef& x, Rng& rng) const;
  /// Deterministic mixture score sum_t p_t y(theta^t; x) (analysis, not deployment).
  Scalar predict_expected(const VecRef& x) const;

  Scalar forward_snapshot(Index i, const VecRef& x) const;

  /// Classifier with probability mass moved to a single snapshot.
  StochasticClassifier point_mass(Index i) const;
  /// Classifier restricted to the same snapshots under new probabilities.
  StochasticClassifier reweighted(Vector probs) const;

 private:
  TwoLayerNet skeleton_;
  std::vector<Vector> snapshots_;
  Vector probs_;
};

/// Accuracy / per-group accuracy / per-group recall block, the column set of
/// the experiment tables. Group-less datasets fill only the overall column.
struct EvalReport {
  std::string classifier;
  Scalar accuracy = 0.0;
  Scalar accuracy_a = 0.0;
  Scalar accuracy_ac = 0.0;
  Scalar recall_a = 0.0;
  Scalar recall_ac = 0.0;

  Scalar recall_gap() const { return std::abs(recall_a - recall_ac); }
};

/// Exact mixture evaluation: expectation over the snapshot draw, i.e.
/// sum_t p_t * metric(theta^t). This is what sampled prediction converges to.
EvalReport evaluate_mixture(const StochasticClassifier& clf, const Dataset& ds,
                            const std::string& name);

/// Deterministic evaluation of the sign of the expected score.
EvalReport evaluate_expected_score(const StochasticClassifier& clf,
                                   const Dataset& ds, const std::string& name);

/// Monte Carlo evaluation with one snapshot draw per prediction; cycles the
/// dataset until at least `draws` predictions were made.
EvalReport evaluate_sampled(const StochasticClassifier& clf, const Dataset& ds,
                            const std::string& name, Index draws, Rng& rng);

/// Single fixed parameter vector (Last / Best / Unconstrained baselines).
EvalReport evaluate_single(const TwoLayerNet& skeleton, const Vector& theta,
                           const Dataset& ds, const std::string& name);

}  // namespace conlearn
