#include "conlearn/serialize.hpp"

#include <fstream>
#include <sstream>

namespace conlearn {
namespace {

void check_kind(const Json& j, const std::string& kind) {
  if (!j.contains("format_version") || !j["format_version"].is_number_integer())
    throw ConfigError("missing format_version");
  if (j.value("kind", std::string()) != kind)
    throw ConfigError("expected kind '" + kind + "'");
  if (j["format_version"].get<int>() != 1)
    throw ConfigError("unsupported format_version");
}

}  // namespace

Json vector_to_json(const Vector& v) {
  Json arr = Json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw ConfigError("expected a numeric array");
  Vector v(static_cast<Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = j[i].get<Scalar>();
  return v;
}

Json checkpoint_to_json(const TwoLayerNet& net) {
  Json j;
  j["format_version"] = 1;
  j["kind"] = "model-checkpoint";
  j["m"] = net.width();
  j["d"] = net.input_dim();
  j["D"] = net.radius();
  j["seed"] = net.seed();
  j["b"] = vector_to_json(net.signs());
  j["theta"] = vector_to_json(net.theta());
  j["theta0"] = vector_to_json(net.theta0());
  return j;
}

TwoLayerNet checkpoint_from_json(const Json& j) {
  check_kind(j, "model-checkpoint");
  return TwoLayerNet(j.at("m").get<Index>(), j.at("d").get<Index>(),
                     j.at("D").get<Scalar>(), j.at("seed").get<std::uint64_t>(),
                     vector_from_json(j.at("theta")),
                     vector_from_json(j.at("theta0")),
                     vector_from_json(j.at("b")));
}

void save_checkpoint(const TwoLayerNet& net, const std::string& path) {
  save_json(checkpoint_to_json(net), path);
}

TwoLayerNet load_checkpoint(const std::string& path) {
  return checkpoint_from_json(load_json(path));
}

Json bundle_to_json(const ClassifierBundle& bundle) {
  Json j;
  j["format_version"] = 1;
  j["kind"] = "classifier-bundle";
  Json model;
  model["m"] = bundle.skeleton.width();
  model["d"] = bundle.skeleton.input_dim();
  model["D"] = bundle.skeleton.radius();
  model["seed"] = bundle.skeleton.seed();
  model["b"] = vector_to_json(bundle.skeleton.signs());
  model["theta0"] = vector_to_json(bundle.skeleton.theta0());
  j["model"] = std::move(model);
  Json snaps = Json::array();
  for (const auto& s : bundle.snapshots) snaps.push_back(vector_to_json(s));
  j["snapshots"] = std::move(snaps);
  j["snapshot_ts"] = bundle.snapshot_ts;
  j["p"] = vector_to_json(bundle.probs);
  j["provenance"] = bundle.provenance;
  return j;
}

ClassifierBundle bundle_from_json(const Json& j) {
  check_kind(j, "classifier-bundle");
  const Json& model = j.at("model");
  Vector theta0 = vector_from_json(model.at("theta0"));
  TwoLayerNet skeleton(model.at("m").get<Index>(), model.at("d").get<Index>(),
                       model.at("D").get<Scalar>(),
                       model.at("seed").get<std::uint64_t>(), theta0, theta0,
                       vector_from_json(model.at("b")));
  std::vector<Vector> snapshots;
  for (const auto& s : j.at("snapshots")) snapshots.push_back(vector_from_json(s));
  ClassifierBundle bundle{std::move(skeleton), std::move(snapshots),
                          j.value("snapshot_ts", std::vector<Index>{}),
                          vector_from_json(j.at("p")),
                          j.value("provenance", Json::object())};
  return bundle;
}

void save_bundle(const ClassifierBundle& bundle, const std::string& path) {
  save_json(bundle_to_json(bundle), path);
}

ClassifierBundle load_bundle(const std::string& path) {
  return bundle_from_json(load_json(path));
}

void save_json(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

void trace_to_csv(const MetricsTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  out.precision(17);
  const Index K = trace.rows.empty() ? 0 : trace.rows.front().rates.size();
  const Index J = trace.rows.empty() ? 0 : trace.rows.front().g_of_xi.size();
  out << "t,objective";
  for (Index k = 1; k <= K; ++k) out << ",r_" << k;
  for (Index j = 1; j <= J; ++j) out << ",g_xi_" << j;
  for (Index j = 1; j <= J; ++j) out << ",g_rates_" << j;
  for (Index i = 1; i <= J + K; ++i) out << ",lambda_" << i;
  out << ",theta_dist\n";
  for (const auto& row : trace.rows) {
    out << row.t << "," << row.objective;
    for (Index k = 0; k < K; ++k) out << "," << row.rates[k];
    for (Index j = 0; j < J; ++j) out << "," << row.g_of_xi[j];
    for (Index j = 0; j < J; ++j) out << "," << row.g_of_rates[j];
    for (Index i = 0; i < J + K; ++i) out << "," << row.lambda[i];
    out << "," << row.theta_dist << "\n";
  }
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<Scalar>>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  out.precision(17);
  for (size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "");
  out << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? "," : "");
    out << "\n";
  }
}

std::string json_hash(const Json& j) {
  const std::string dump = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

}  // namespace conlearn
