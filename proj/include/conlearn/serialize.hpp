#pragma once

#include "conlearn/classifier.hpp"
#include "conlearn/model.hpp"
#include "conlearn/optimizer.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace conlearn {

using Json = nlohmann::json;

Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

/// Model checkpoint (format_version 1): {m, d, D, seed, b, theta, theta0}.
/// JSON doubles are emitted in shortest round-trip form, so theta survives
/// the round trip bit-exactly.
Json checkpoint_to_json(const TwoLayerNet& net);
TwoLayerNet checkpoint_from_json(const Json& j);
void save_checkpoint(const TwoLayerNet& net, const std::string& path);
TwoLayerNet load_checkpoint(const std::string& path);

/// Classifier bundle: model skeleton, snapshot list, sampling probabilities,
/// and provenance (run config hash, dataset fingerprint, problem config).
struct ClassifierBundle {
  TwoLayerNet skeleton;
  std::vector<Vector> snapshots;
  std::vector<Index> snapshot_ts;
  Vector probs;
  Json provenance;

  StochasticClassifier classifier() const {
    return StochasticClassifier(skeleton, snapshots, probs);
  }
};

Json bundle_to_json(const ClassifierBundle& bundle);
ClassifierBundle bundle_from_json(const Json& j);
void save_bundle(const ClassifierBundle& bundle, const std::string& path);
ClassifierBundle load_bundle(const std::string& path);

void save_json(const Json& j, const std::string& path);
Json load_json(const std::string& path);

/// One row per logged iteration: t, objective, exact rates, g_j(xi), g_j(rates),
/// lambda, ||theta - theta0||.
void trace_to_csv(const MetricsTrace& trace, const std::string& path);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<Scalar>>& rows);

/// FNV-1a over the canonical dump; used as the run config hash in provenance.
std::string json_hash(const Json& j);

}  // namespace conlearn
