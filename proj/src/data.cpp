#include "conlearn/data.hpp"

#include "conlearn/rng.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace conlearn {
namespace {

bool is_missing(const std::string& v) {
  return v.empty() || v == "NA" || v == "na" || v == "?";
}

bool parse_number(const std::string& v, Scalar& out) {
  if (v.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(v.c_str(), &end);
  return errno == 0 && end == v.c_str() + v.size();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::uint64_t fnv1a(const void* data, size_t len, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::vector<Index> Dataset::indices_where(std::optional<int> grp,
                                          std::optional<int> label) const {
  require(!grp.has_value() || has_group(), "dataset has no group column");
  std::vector<Index> out;
  for (Index i = 0; i < rows(); ++i) {
    if (grp && group[static_cast<size_t>(i)] != *grp) continue;
    if (label && sgn(labels[i]) != *label) continue;
    out.push_back(i);
  }
  return out;
}

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open CSV file: " + path);
  require(!schema.feature_cols.empty(), "schema needs feature columns");
  require(!schema.label_col.empty(), "schema needs a label column");

  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV file: " + path);
  const std::vector<std::string> header = split_csv_line(line);
  auto col_index = [&](const std::string& name) -> size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw ConfigError("column '" + name + "' not found in " + path);
    return static_cast<size_t>(it - header.begin());
  };

  std::vector<size_t> fcols;
  for (const auto& c : schema.feature_cols) fcols.push_back(col_index(c));
  const size_t lcol = col_index(schema.label_col);
  std::optional<size_t> gcol;
  if (schema.group_col) gcol = col_index(*schema.group_col);

  std::vector<std::vector<std::string>> raw;  // per kept row: features (strings)
  std::vector<Scalar> labels;
  std::vector<int> group;
  Index dropped = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    bool missing = false;
    for (const size_t c : fcols)
      if (c >= fields.size() || is_missing(fields[c])) missing = true;
    if (lcol >= fields.size() || is_missing(fields[lcol])) missing = true;
    if (gcol && (*gcol >= fields.size() || is_missing(fields[*gcol]))) missing = true;
    if (missing) {
      ++dropped;
      continue;
    }
    const auto lit = schema.label_map.find(fields[lcol]);
    if (lit == schema.label_map.end())
      throw ConfigError("unmapped label value '" + fields[lcol] + "' in " + path);
    require(lit->second == 1 || lit->second == -1, "label map values must be +-1");
    if (gcol) {
      const auto git = schema.group_map.find(fields[*gcol]);
      if (git == schema.group_map.end())
        throw ConfigError("unmapped group value '" + fields[*gcol] + "' in " + path);
      group.push_back(git->second);
    }
    labels.push_back(static_cast<Scalar>(lit->second));
    std::vector<std::string> feats;
    feats.reserve(fcols.size());
    for (const size_t c : fcols) feats.push_back(fields[c]);
    raw.push_back(std::move(feats));
  }
  if (raw.empty()) throw ConfigError("no usable rows in " + path);

  // Column typing: numeric if every value parses; otherwise one-hot expand.
  const size_t ncols = fcols.size();
  std::vector<bool> numeric(ncols, true);
  for (const auto& row : raw) {
    for (size_t c = 0; c < ncols; ++c) {
      Scalar v;
      if (!parse_number(row[c], v)) numeric[c] = false;
    }
  }

  std::vector<std::string> names;
  std::vector<std::string> onehot_src;
  std::vector<std::vector<std::string>> categories(ncols);
  for (size_t c = 0; c < ncols; ++c) {
    if (numeric[c]) {
      names.push_back(schema.feature_cols[c]);
      onehot_src.emplace_back("");
    } else {
      std::set<std::string> vals;
      for (const auto& row : raw) vals.insert(row[c]);
      categories[c].assign(vals.begin(), vals.end());
      for (const auto& v : categories[c]) {
        names.push_back(schema.feature_cols[c] + "=" + v);
        onehot_src.push_back(schema.feature_cols[c]);
      }
    }
  }

  Dataset ds;
  const Index n = static_cast<Index>(raw.size());
  const Index d = static_cast<Index>(names.size());
  ds.features.resize(n, d);
  for (Index i = 0; i < n; ++i) {
    Index j = 0;
    for (size_t c = 0; c < ncols; ++c) {
      if (numeric[c]) {
        Scalar v = 0.0;
        parse_number(raw[static_cast<size_t>(i)][c], v);
        ds.features(i, j++) = v;
      } else {
        for (const auto& cat : categories[c])
          ds.features(i, j++) = raw[static_cast<size_t>(i)][c] == cat ? 1.0 : 0.0;
      }
    }
  }
  ds.labels = Eigen::Map<Vector>(labels.data(), n);
  ds.group = std::move(group);
  ds.feature_names = std::move(names);
  ds.onehot_source = std::move(onehot_src);
  ds.dropped_rows = dropped;

  if (schema.standardize) {
    for (Index j = 0; j < d; ++j) {
      const Scalar mean = ds.features.col(j).mean();
      const Scalar sd = std::sqrt(
          (ds.features.col(j).array() - mean).square().sum() / std::max<Index>(n - 1, 1));
      ds.features.col(j).array() -= mean;
      if (sd > 0.0) ds.features.col(j) /= sd;
    }
  }

  const Scalar max_norm = ds.features.rowwise().norm().maxCoeff();
  if (max_norm > 0.0) {
    ds.features /= max_norm;
    ds.norm_scale = max_norm;
  }
  return ds;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, Scalar train_fraction,
                                  std::uint64_t seed) {
  require(train_fraction > 0.0 && train_fraction < 1.0,
          "train fraction must be in (0, 1)");
  const Index n = ds.rows();
  Index ntrain = static_cast<Index>(std::floor(train_fraction * static_cast<Scalar>(n)));
  ntrain = std::clamp<Index>(ntrain, 1, n - 1);
  require(n >= 2, "need at least 2 rows to split");

  std::vector<Index> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  Rng rng(seed);
  for (Index i = n - 1; i > 0; --i) {
    const Index j = rng.uniform_index(i + 1);
    std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
  }

  auto take = [&](Index lo, Index hi) {
    Dataset out;
    out.features.resize(hi - lo, ds.dim());
    out.labels.resize(hi - lo);
    if (ds.has_group()) out.group.resize(static_cast<size_t>(hi - lo));
    for (Index i = lo; i < hi; ++i) {
      const Index src = idx[static_cast<size_t>(i)];
      out.features.row(i - lo) = ds.features.row(src);
      out.labels[i - lo] = ds.labels[src];
      if (ds.has_group())
        out.group[static_cast<size_t>(i - lo)] = ds.group[static_cast<size_t>(src)];
    }
    out.norm_scale = ds.norm_scale;
    out.feature_names = ds.feature_names;
    out.onehot_source = ds.onehot_source;
    return out;
  };
  return {take(0, ntrain), take(ntrain, n)};
}

Dataset generate_biased_synthetic(Index n, Index d, Scalar bias_gap,
                                  std::uint64_t seed) {
  require(n >= 40, "need n >= 40");
  require(d >= 2, "need d >= 2");
  require(bias_gap >= 0.0 && bias_gap < 1.0, "bias_gap must be in [0, 1)");
  const Scalar delta = 1.0;
  const Scalar sigma = 0.6;
  const Scalar gamma = 1.0;
  const Scalar noise_sd = 0.5;

  Rng rng(seed);
  Dataset ds;
  ds.features.resize(n, d);
  ds.labels.resize(n);
  ds.group.resize(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const int z = rng.rademacher();
    const int g = (rng.next_u64() & 1ULL) ? 1 : 0;
    ds.labels[i] = static_cast<Scalar>(z);
    ds.group[static_cast<size_t>(i)] = g;
    Scalar mean = delta * static_cast<Scalar>(z);
    if (z == 1 && g == 0) mean -= delta * bias_gap;
    ds.features(i, 0) = mean + sigma * rng.gaussian();
    if (d >= 2)
      ds.features(i, 1) = (g == 1 ? gamma : -gamma) + 0.1 * rng.gaussian();
    for (Index j = 2; j < d; ++j) ds.features(i, j) = noise_sd * rng.gaussian();
  }
  ds.feature_names.resize(static_cast<size_t>(d));
  ds.onehot_source.assign(static_cast<size_t>(d), "");
  for (Index j = 0; j < d; ++j)
    ds.feature_names[static_cast<size_t>(j)] = "f" + std::to_string(j);

  const Scalar max_norm = ds.features.rowwise().norm().maxCoeff();
  ds.features /= max_norm;
  ds.norm_scale = max_norm;
  return ds;
}

std::string dataset_fingerprint(const Dataset& ds) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a(ds.features.data(),
            sizeof(Scalar) * static_cast<size_t>(ds.features.size()), h);
  h = fnv1a(ds.labels.data(), sizeof(Scalar) * static_cast<size_t>(ds.labels.size()), h);
  if (!ds.group.empty())
    h = fnv1a(ds.group.data(), sizeof(int) * ds.group.size(), h);
  h = fnv1a(&ds.norm_scale, sizeof(Scalar), h);
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

void write_dataset_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write CSV file: " + path);
  out.precision(17);
  for (Index j = 0; j < ds.dim(); ++j) out << "f" << j << ",";
  out << "label";
  if (ds.has_group()) out << ",group";
  out << "\n";
  for (Index i = 0; i < ds.rows(); ++i) {
    for (Index j = 0; j < ds.dim(); ++j) out << ds.features(i, j) << ",";
    out << (ds.labels[i] > 0 ? 1 : -1);
    if (ds.has_group())
      out << "," << (ds.group[static_cast<size_t>(i)] == 1 ? "A" : "Ac");
    out << "\n";
  }
}

CsvSchema standard_schema(Index d, bool with_group) {
  CsvSchema schema;
  for (Index j = 0; j < d; ++j)
    schema.feature_cols.push_back("f" + std::to_string(j));
  schema.label_col = "label";
  schema.label_map = {{"1", 1}, {"-1", -1}};
  if (with_group) {
    schema.group_col = "group";
    schema.group_map = {{"A", 1}, {"Ac", 0}};
  }
  return schema;
}

}  // namespace conlearn
