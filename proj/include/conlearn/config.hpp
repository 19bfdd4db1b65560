#pragma once

#include "conlearn/data.hpp"
#include "conlearn/optimizer.hpp"
#include "conlearn/problem.hpp"
#include "conlearn/serialize.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace conlearn {

/// Dataset source: a CSV with a schema, or the synthetic generator. An
/// optional split keeps only the requested side for training and exposes the
/// other for evaluation.
struct DatasetConfig {
  std::string csv_path;  // empty -> synthetic
  CsvSchema schema;
  Index synth_n = 2000;
  Index synth_d = 8;
  Scalar synth_bias_gap = 0.8;
  std::uint64_t synth_seed = 42;
  std::optional<Scalar> split_fraction;
  std::uint64_t split_seed = 13;
};

struct LoadedData {
  std::shared_ptr<const Dataset> train;
  std::shared_ptr<const Dataset> test;  // null without a split
  std::string fingerprint;              // of the full set
};

DatasetConfig dataset_config_from_json(const Json& j, const std::string& ctx);
LoadedData load_data(const DatasetConfig& cfg);

struct ProblemConfig {
  std::string preset = "equal-opportunity";  // or "unconstrained", "g-mean",
                                             // "h-mean", "custom"
  LossKind objective = LossKind::CrossEntropyOnScore;
  Scalar objective_smoothing = kDefaultSmoothing;
  Scalar kappa = 1.0;
  // custom preset only:
  std::vector<ScalarLoss> metrics;
  std::vector<ScalarLoss> surrogates;
  std::vector<OuterConstraint> outers;
  std::vector<std::pair<std::optional<int>, std::optional<int>>> sampler_filters;
};

ProblemConfig problem_config_from_json(const Json& j, const std::string& ctx);
Json problem_config_to_json(const ProblemConfig& cfg);
ConstraintProblem build_problem(const ProblemConfig& cfg,
                                std::shared_ptr<const Dataset> ds, Scalar radius);

struct ModelConfig {
  Index m = 256;
  Index d = 0;  // 0 -> dataset dimension
  Scalar radius = 10.0;
  std::uint64_t seed = 7;
};

ModelConfig model_config_from_json(const Json& j, const std::string& ctx);

struct OptimizerJsonConfig {
  Index T = 20000;
  std::vector<std::uint64_t> seeds = {11};
  Index log_every = 0;
  Index burn_in = 1000;
  Index batch_size = 1;
  std::optional<StepSizes> step_overrides;
  Scalar step_scale = 1.0;
};

OptimizerJsonConfig optimizer_config_from_json(const Json& j,
                                               const std::string& ctx);
OptimizerConfig optimizer_config(const OptimizerJsonConfig& cfg,
                                 std::uint64_t seed);

struct TrainConfig {
  DatasetConfig dataset;
  ProblemConfig problem;
  ModelConfig model;
  OptimizerJsonConfig optimizer;
  bool train_unconstrained_baseline = false;
};

TrainConfig train_config_from_json(const Json& j);

struct EvaluateConfig {
  std::string bundle_path;
  std::vector<std::string> extra_bundles;  // e.g. shrunk / baseline bundles
  DatasetConfig dataset;
  Index draws = 10000;
  std::uint64_t seed = 5;
};

EvaluateConfig evaluate_config_from_json(const Json& j);

struct ShrinkCmdConfig {
  std::string bundle_path;
  DatasetConfig dataset;
  std::optional<Scalar> epsilon;
};

ShrinkCmdConfig shrink_config_from_json(const Json& j);

struct VerifyLinearizationConfig {
  std::vector<Index> m_grid = {64, 256, 1024, 4096, 16384};
  Scalar D_slope = 1.0;  // radius for the slope-vs-m fits
  std::vector<Scalar> D_grid = {0.5, 1.0, 2.0, 4.0};  // monotonicity sweep
  Index m_for_D = 1024;
  Index d = 16;
  Index replicates = 2000;
  std::uint64_t seed = 0;
  Scalar slope_lo = -0.8;
  Scalar slope_hi = -0.2;
  std::vector<Index> bound_m_grid = {64, 1024, 16384};
  Index bound_replicates = 2000;
  Scalar bound_threshold = 10.0;
};

VerifyLinearizationConfig verify_linearization_config_from_json(const Json& j);

struct VerifyRegretConfig {
  std::vector<Index> T_grid = {64, 128, 256, 512, 1024, 2048, 4096, 8192};
  int seeds = 10;
  Scalar bias = 0.1;
  std::uint64_t seed = 0;
  Scalar slope_lo = -0.65;
  Scalar slope_hi = -0.35;
};

VerifyRegretConfig verify_regret_config_from_json(const Json& j);

struct VerifyBoundConfig {
  DatasetConfig dataset;
  ProblemConfig problem;
  ModelConfig model;
  OptimizerJsonConfig optimizer;
  std::vector<Scalar> kappas = {0.5, 1.0, 2.0, 4.0};
};

VerifyBoundConfig verify_bound_config_from_json(const Json& j);

struct GenDataConfig {
  Index n = 2000;
  Index d = 8;
  Scalar bias_gap = 0.8;
  std::uint64_t seed = 42;
  std::string csv_out;
  std::string schema_out;  // optional; "" skips
};

GenDataConfig gen_data_config_from_json(const Json& j);

}  // namespace conlearn
