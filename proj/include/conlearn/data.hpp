#pragma once

#include "conlearn/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace conlearn {

/// Column schema for CSV ingestion. Label values map to {-1,+1}; group values
/// map to {1 = A, 0 = Ac}. Feature columns whose values are not all numeric are
/// one-hot expanded.
struct CsvSchema {
  std::vector<std::string> feature_cols;
  std::string label_col;
  std::map<std::string, int> label_map;
  std::optional<std::string> group_col;
  std::map<std::string, int> group_map;  // value -> 1 (A) or 0 (Ac)
  bool standardize = false;  // optional per-column z-scoring before the norm scaling
};

/// Immutable dataset with rows scaled so that max_i ||x_i||_2 = 1 (the scale
/// divisor is kept so raw-space values stay recoverable).
struct Dataset {
  Matrix features;            // n x d
  Vector labels;              // entries in {-1,+1}
  std::vector<int> group;     // 1 = A, 0 = Ac; empty when no group column
  Scalar norm_scale = 1.0;
  std::vector<std::string> feature_names;
  std::vector<std::string> onehot_source;  // per column: source column ("" if numeric)
  Index dropped_rows = 0;     // rows removed for missing values

  Index rows() const { return features.rows(); }
  Index dim() const { return features.cols(); }
  bool has_group() const { return !group.empty(); }

  /// Row indices matching (group, label); pass std::nullopt to leave a field
  /// unconstrained.
  std::vector<Index> indices_where(std::optional<int> grp,
                                   std::optional<int> label) const;
};

Dataset load_csv(const std::string& path, const CsvSchema& schema);

/// Reproducible shuffle split; sizes (floor(n*fraction), rest), each side >= 1.
/// The norm scale is inherited from the full set.
std::pair<Dataset, Dataset> split(const Dataset& ds, Scalar train_fraction,
                                  std::uint64_t seed);

/// Two-group synthetic classification data with a recall bias knob.
///
/// Construction (before max-norm scaling):
///   column 0: class signal, N(z * delta, sigma^2); positives of group Ac are
///             shifted toward the boundary by delta * bias_gap;
///   column 1: group indicator, +-gamma + N(0, 0.01) (A positive);
///   columns 2..d-1: N(0, noise_sd^2) nuisance.
/// Labels and groups are independent fair coins. With delta=1, sigma=0.6,
/// gamma=1, noise_sd=0.5, the accuracy-optimal boundary misclassifies more Ac
/// positives, so an unconstrained classifier exhibits a recall gap that grows
/// with bias_gap, while the group column leaves room to equalize recalls.
Dataset generate_biased_synthetic(Index n, Index d, Scalar bias_gap,
                                  std::uint64_t seed);

/// Content hash over features, labels, group, and scale (FNV-1a, hex string).
std::string dataset_fingerprint(const Dataset& ds);

/// Writes the dataset as a CSV (header f0..f{d-1},label[,group]) that load_csv
/// can re-ingest with standard_schema().
void write_dataset_csv(const Dataset& ds, const std::string& path);

/// Schema matching write_dataset_csv output.
CsvSchema standard_schema(Index d, bool with_group);

}  // namespace conlearn
