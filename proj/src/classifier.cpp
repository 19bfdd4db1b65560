#include "conlearn/classifier.hpp"

#include <cmath>
#include <utility>

namespace conlearn {
namespace {

struct Tally {
  Scalar correct = 0, total = 0;
  Scalar correct_a = 0, total_a = 0;
  Scalar correct_ac = 0, total_ac = 0;
  Scalar hit_a = 0, pos_a = 0;
  Scalar hit_ac = 0, pos_ac = 0;

  void add(const Dataset& ds, Index row, int pred, Scalar weight) {
    const int z = sgn(ds.labels[row]);
    const bool ok = pred == z;
    total += weight;
    if (ok) correct += weight;
    if (!ds.has_group()) return;
    const bool in_a = ds.group[static_cast<size_t>(row)] == 1;
    (in_a ? total_a : total_ac) += weight;
    if (ok) (in_a ? correct_a : correct_ac) += weight;
    if (z == 1) {
      (in_a ? pos_a : pos_ac) += weight;
      if (pred == 1) (in_a ? hit_a : hit_ac) += weight;
    }
  }

  EvalReport report(const std::string& name) const {
    EvalReport r;
    r.classifier = name;
    r.accuracy = total > 0 ? correct / total : 0.0;
    r.accuracy_a = total_a > 0 ? correct_a / total_a : 0.0;
    r.accuracy_ac = total_ac > 0 ? correct_ac / total_ac : 0.0;
    r.recall_a = pos_a > 0 ? hit_a / pos_a : 0.0;
    r.recall_ac = pos_ac > 0 ? hit_ac / pos_ac : 0.0;
    return r;
  }
};

}  // namespace

StochasticClassifier::StochasticClassifier(TwoLayerNet skeleton,
                                           std::vector<Vector> snapshots,
                                           Vector probs)
    : skeleton_(std::move(skeleton)), snapshots_(std::move(snapshots)),
      probs_(std::move(probs)) {
  require(!snapshots_.empty(), "classifier needs at least one snapshot");
  require(probs_.size() == static_cast<Index>(snapshots_.size()),
          "probability vector size != snapshot count");
  require((probs_.array() >= 0.0).all(), "probabilities must be >= 0");
  require(std::abs(probs_.sum() - 1.0) <= 1e-12, "probabilities must sum to 1");
  const Index md = skeleton_.width() * skeleton_.input_dim();
  for (const auto& th : snapshots_) {
    require(th.size() == md, "snapshot size != m*d");
    require((th - skeleton_.theta0()).norm() <= skeleton_.radius() * (1 + 1e-9),
            "snapshot outside the search ball");
  }
}

Index StochasticClassifier::draw_index(Rng& rng) const {
  const Scalar u = rng.uniform();
  Scalar acc = 0.0;
  for (Index i = 0; i < probs_.size(); ++i) {
    acc += probs_[i];
    if (u < acc) return i;
  }
  return probs_.size() - 1;
}

Scalar StochasticClassifier::forward_snapshot(Index i, const VecRef& x) const {
  return forward_flat(skeleton_.signs(), skeleton_.width(), skeleton_.input_dim(),
                      snapshots_[static_cast<size_t>(i)], x);
}

Scalar StochasticClassifier::predict(const VecRef& x, Rng& rng) const {
  return forward_snapshot(draw_index(rng), x);
}

Scalar StochasticClassifier::predict_expected(const VecRef& x) const {
  Scalar acc = 0.0;
  for (Index i = 0; i < num_snapshots(); ++i)
    if (probs_[i] > 0.0) acc += probs_[i] * forward_snapshot(i, x);
  return acc;
}

StochasticClassifier StochasticClassifier::point_mass(Index i) const {
  Vector p = Vector::Zero(num_snapshots());
  p[i] = 1.0;
  return StochasticClassifier(skeleton_, snapshots_, std::move(p));
}

StochasticClassifier StochasticClassifier::reweighted(Vector probs) const {
  return StochasticClassifier(skeleton_, snapshots_, std::move(probs));
}

EvalReport evaluate_single(const TwoLayerNet& skeleton, const Vector& theta,
                           const Dataset& ds, const std::string& name) {
  TwoLayerNet net = skeleton;
  net.theta() = theta;
  Tally tally;
  for (Index i = 0; i < ds.rows(); ++i) {
    const Scalar y = forward(net, ds.features.row(i).transpose());
    tally.add(ds, i, sgn(y), 1.0);
  }
  return tally.report(name);
}

EvalReport evaluate_mixture(const StochasticClassifier& clf, const Dataset& ds,
                            const std::string& name) {
  Tally tally;
  TwoLayerNet net = clf.skeleton();
  for (Index t = 0; t < clf.num_snapshots(); ++t) {
    const Scalar p = clf.probs()[t];
    if (p == 0.0) continue;
    net.theta() = clf.snapshots()[static_cast<size_t>(t)];
    for (Index i = 0; i < ds.rows(); ++i) {
      const Scalar y = forward(net, ds.features.row(i).transpose());
      tally.add(ds, i, sgn(y), p);
    }
  }
  return tally.report(name);
}

EvalReport evaluate_expected_score(const StochasticClassifier& clf,
                                   const Dataset& ds, const std::string& name) {
  Tally tally;
  for (Index i = 0; i < ds.rows(); ++i) {
    const Scalar y = clf.predict_expected(ds.features.row(i).transpose());
    tally.add(ds, i, sgn(y), 1.0);
  }
  return tally.report(name);
}

EvalReport evaluate_sampled(const StochasticClassifier& clf, const Dataset& ds,
                            const std::string& name, Index draws, Rng& rng) {
  Tally tally;
  Index made = 0;
  while (made < draws) {
    for (Index i = 0; i < ds.rows() && made < draws; ++i, ++made) {
      const Scalar y = clf.predict(ds.features.row(i).transpose(), rng);
      tally.add(ds, i, sgn(y), 1.0);
    }
  }
  return tally.report(name);
}

}  // namespace conlearn
