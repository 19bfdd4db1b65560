#include "conlearn/config.hpp"

#include <utility>

namespace conlearn {
namespace {

[[noreturn]] void fail(const std::string& ctx, const std::string& what) {
  throw ConfigError(ctx + ": " + what);
}

const Json& req(const Json& j, const std::string& key, const std::string& ctx) {
  if (!j.contains(key)) fail(ctx, "missing required field '" + key + "'");
  return j.at(key);
}

template <typename T>
T get(const Json& j, const std::string& key, const std::string& ctx) {
  try {
    return req(j, key, ctx).get<T>();
  } catch (const Json::exception& e) {
    fail(ctx + "." + key, e.what());
  }
}

template <typename T>
T get_or(const Json& j, const std::string& key, T fallback,
         const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    fail(ctx + "." + key, e.what());
  }
}

LossKind loss_kind(const std::string& name, const std::string& ctx) {
  const auto kind = loss_kind_from_name(name);
  if (!kind) fail(ctx, "unknown loss kind '" + name + "'");
  return *kind;
}

ScalarLoss loss_from_json(const Json& j, const std::string& ctx) {
  if (j.is_string())
    return make_loss(loss_kind(j.get<std::string>(), ctx));
  const auto kind = loss_kind(get<std::string>(j, "kind", ctx), ctx);
  return make_loss(kind, get_or<Scalar>(j, "smoothing", kDefaultSmoothing, ctx));
}

std::optional<int> filter_field(const Json& j, const std::string& key,
                                const std::string& ctx) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (j.at(key).is_string()) {
    const std::string s = j.at(key).get<std::string>();
    if (key == "group") {
      if (s == "A") return 1;
      if (s == "Ac") return 0;
      fail(ctx + "." + key, "expected 'A' or 'Ac'");
    }
    fail(ctx + "." + key, "expected an integer");
  }
  return j.at(key).get<int>();
}

}  // namespace

DatasetConfig dataset_config_from_json(const Json& j, const std::string& ctx) {
  DatasetConfig cfg;
  if (j.contains("csv")) {
    cfg.csv_path = get<std::string>(j, "csv", ctx);
    const Json& sj = req(j, "schema", ctx);
    const std::string sctx = ctx + ".schema";
    cfg.schema.feature_cols =
        get<std::vector<std::string>>(sj, "feature_cols", sctx);
    cfg.schema.label_col = get<std::string>(sj, "label_col", sctx);
    for (const auto& [k, v] : req(sj, "label_map", sctx).items())
      cfg.schema.label_map[k] = v.get<int>();
    if (sj.contains("group_col")) {
      cfg.schema.group_col = get<std::string>(sj, "group_col", sctx);
      for (const auto& [k, v] : req(sj, "group_map", sctx).items())
        cfg.schema.group_map[k] = v.get<int>();
    }
    cfg.schema.standardize = get_or<bool>(sj, "standardize", false, sctx);
  } else if (j.contains("synthetic")) {
    const Json& sj = j.at("synthetic");
    const std::string sctx = ctx + ".synthetic";
    cfg.synth_n = get_or<Index>(sj, "n", cfg.synth_n, sctx);
    cfg.synth_d = get_or<Index>(sj, "d", cfg.synth_d, sctx);
    cfg.synth_bias_gap = get_or<Scalar>(sj, "bias_gap", cfg.synth_bias_gap, sctx);
    cfg.synth_seed = get_or<std::uint64_t>(sj, "seed", cfg.synth_seed, sctx);
  } else {
    fail(ctx, "need either 'csv' or 'synthetic'");
  }
  if (j.contains("split")) {
    const Json& sj = j.at("split");
    cfg.split_fraction = get_or<Scalar>(sj, "train_fraction", 0.7, ctx + ".split");
    cfg.split_seed = get_or<std::uint64_t>(sj, "seed", 13, ctx + ".split");
  }
  return cfg;
}

LoadedData load_data(const DatasetConfig& cfg) {
  Dataset full = cfg.csv_path.empty()
                     ? generate_biased_synthetic(cfg.synth_n, cfg.synth_d,
                                                 cfg.synth_bias_gap, cfg.synth_seed)
                     : load_csv(cfg.csv_path, cfg.schema);
  LoadedData out;
  out.fingerprint = dataset_fingerprint(full);
  if (cfg.split_fraction) {
    auto [train, test] = split(full, *cfg.split_fraction, cfg.split_seed);
    out.train = std::make_shared<Dataset>(std::move(train));
    out.test = std::make_shared<Dataset>(std::move(test));
  } else {
    out.train = std::make_shared<Dataset>(std::move(full));
  }
  return out;
}

ProblemConfig problem_config_from_json(const Json& j, const std::string& ctx) {
  ProblemConfig cfg;
  cfg.preset = get_or<std::string>(j, "preset", "custom", ctx);
  if (j.contains("objective"))
    cfg.objective = loss_from_json(j.at("objective"), ctx + ".objective").kind;
  cfg.kappa = get_or<Scalar>(j, "kappa", 1.0, ctx);
  if (cfg.kappa <= 0.0) fail(ctx + ".kappa", "must be positive");
  if (cfg.preset != "custom") {
    if (cfg.preset != "equal-opportunity" && cfg.preset != "g-mean" &&
        cfg.preset != "h-mean" && cfg.preset != "unconstrained")
      fail(ctx + ".preset", "unknown preset '" + cfg.preset + "'");
    return cfg;
  }
  for (const auto& m : req(j, "metrics", ctx))
    cfg.metrics.push_back(loss_from_json(m, ctx + ".metrics"));
  for (const auto& s : req(j, "surrogates", ctx))
    cfg.surrogates.push_back(loss_from_json(s, ctx + ".surrogates"));
  for (const auto& o : req(j, "outers", ctx)) {
    const std::string octx = ctx + ".outers";
    const auto kind = outer_kind_from_name(get<std::string>(o, "kind", octx));
    if (!kind) fail(octx, "unknown outer kind");
    if (*kind == OuterKind::LinearCombination) {
      cfg.outers.push_back(
          make_linear_outer(vector_from_json(req(o, "coefficients", octx))));
    } else if (*kind == OuterKind::GMean) {
      cfg.outers.push_back(make_gmean_outer());
    } else {
      cfg.outers.push_back(make_hmean_outer());
    }
  }
  for (const auto& f : req(j, "samplers", ctx)) {
    const std::string fctx = ctx + ".samplers";
    cfg.sampler_filters.emplace_back(filter_field(f, "group", fctx),
                                     filter_field(f, "label", fctx));
  }
  return cfg;
}

Json problem_config_to_json(const ProblemConfig& cfg) {
  Json j;
  j["preset"] = cfg.preset;
  j["objective"] = loss_kind_name(cfg.objective);
  j["kappa"] = cfg.kappa;
  if (cfg.preset == "custom") {
    Json metrics = Json::array(), surrogates = Json::array(),
         outers = Json::array(), samplers = Json::array();
    for (const auto& m : cfg.metrics) {
      Json mj;
      mj["kind"] = loss_kind_name(m.kind);
      if (m.smoothing > 0) mj["smoothing"] = m.smoothing;
      metrics.push_back(mj);
    }
    for (const auto& s : cfg.surrogates) {
      Json sj;
      sj["kind"] = loss_kind_name(s.kind);
      if (s.smoothing > 0) sj["smoothing"] = s.smoothing;
      surrogates.push_back(sj);
    }
    for (const auto& o : cfg.outers) {
      Json oj;
      oj["kind"] = outer_kind_name(o.kind);
      if (o.kind == OuterKind::LinearCombination)
        oj["coefficients"] = vector_to_json(o.coefficients);
      outers.push_back(oj);
    }
    for (const auto& [grp, lbl] : cfg.sampler_filters) {
      Json fj;
      if (grp) fj["group"] = *grp;
      if (lbl) fj["label"] = *lbl;
      samplers.push_back(fj);
    }
    j["metrics"] = metrics;
    j["surrogates"] = surrogates;
    j["outers"] = outers;
    j["samplers"] = samplers;
  }
  return j;
}

ConstraintProblem build_problem(const ProblemConfig& cfg,
                                std::shared_ptr<const Dataset> ds, Scalar radius) {
  if (cfg.preset == "unconstrained")
    return build_unconstrained_problem(std::move(ds), cfg.objective, cfg.kappa,
                                       radius);
  if (cfg.preset == "equal-opportunity")
    return build_fairness_problem(std::move(ds), cfg.objective, cfg.kappa, radius);
  if (cfg.preset == "g-mean")
    return build_rate_mean_problem(std::move(ds), OuterKind::GMean, cfg.objective,
                                   cfg.kappa, radius);
  if (cfg.preset == "h-mean")
    return build_rate_mean_problem(std::move(ds), OuterKind::HMean, cfg.objective,
                                   cfg.kappa, radius);

  ConstraintProblem p;
  p.objective = make_loss(cfg.objective, cfg.objective_smoothing);
  p.metrics = cfg.metrics;
  p.surrogates = cfg.surrogates;
  p.outers = cfg.outers;
  require(cfg.sampler_filters.size() == cfg.metrics.size() + 1,
          "custom problem needs K+1 sampler filters (D0 first)");
  for (const auto& [grp, lbl] : cfg.sampler_filters)
    p.samplers.push_back(make_sampler(*ds, grp, lbl));
  p.kappa = cfg.kappa;
  p.radius = radius;
  p.xi_bound = compute_xi_domain(p.surrogates, radius);
  p.dataset = std::move(ds);
  p.validate();
  return p;
}

ModelConfig model_config_from_json(const Json& j, const std::string& ctx) {
  ModelConfig cfg;
  cfg.m = get_or<Index>(j, "m", cfg.m, ctx);
  cfg.d = get_or<Index>(j, "d", cfg.d, ctx);
  cfg.radius = get_or<Scalar>(j, "D", cfg.radius, ctx);
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed, ctx);
  if (cfg.m < 1) fail(ctx + ".m", "must be >= 1");
  if (cfg.radius <= 0) fail(ctx + ".D", "must be positive");
  return cfg;
}

OptimizerJsonConfig optimizer_config_from_json(const Json& j,
                                               const std::string& ctx) {
  OptimizerJsonConfig cfg;
  cfg.T = get_or<Index>(j, "T", cfg.T, ctx);
  if (cfg.T < 0) fail(ctx + ".T", "must be >= 0");
  if (j.contains("seeds"))
    cfg.seeds = get<std::vector<std::uint64_t>>(j, "seeds", ctx);
  else if (j.contains("seed"))
    cfg.seeds = {get<std::uint64_t>(j, "seed", ctx)};
  if (cfg.seeds.empty()) fail(ctx + ".seeds", "need at least one seed");
  cfg.log_every = get_or<Index>(j, "log_every", cfg.log_every, ctx);
  cfg.burn_in = get_or<Index>(j, "burn_in", cfg.burn_in, ctx);
  cfg.batch_size = get_or<Index>(j, "batch_size", cfg.batch_size, ctx);
  if (cfg.batch_size < 1) fail(ctx + ".batch_size", "must be >= 1");
  cfg.step_scale = get_or<Scalar>(j, "step_scale", cfg.step_scale, ctx);
  if (j.contains("step_overrides") && !j.at("step_overrides").is_null()) {
    const Json& sj = j.at("step_overrides");
    StepSizes s;
    s.eta_theta = get<Scalar>(sj, "eta_theta", ctx + ".step_overrides");
    s.eta_xi = get_or<Scalar>(sj, "eta_xi", 0.0, ctx + ".step_overrides");
    s.eta_lambda = get_or<Scalar>(sj, "eta_lambda", 0.0, ctx + ".step_overrides");
    cfg.step_overrides = s;
  }
  return cfg;
}

OptimizerConfig optimizer_config(const OptimizerJsonConfig& cfg,
                                 std::uint64_t seed) {
  OptimizerConfig out;
  out.T = cfg.T;
  out.seed = seed;
  out.log_every = cfg.log_every;
  out.burn_in = cfg.burn_in;
  out.batch_size = cfg.batch_size;
  out.step_overrides = cfg.step_overrides;
  out.step_scale = cfg.step_scale;
  return out;
}

TrainConfig train_config_from_json(const Json& j) {
  TrainConfig cfg;
  cfg.dataset = dataset_config_from_json(req(j, "dataset", "config"), "dataset");
  cfg.problem = problem_config_from_json(req(j, "problem", "config"), "problem");
  cfg.model = model_config_from_json(req(j, "model", "config"), "model");
  cfg.optimizer =
      optimizer_config_from_json(req(j, "optimizer", "config"), "optimizer");
  cfg.train_unconstrained_baseline =
      get_or<bool>(j, "train_unconstrained_baseline", false, "config");
  return cfg;
}

EvaluateConfig evaluate_config_from_json(const Json& j) {
  EvaluateConfig cfg;
  cfg.bundle_path = get<std::string>(j, "bundle", "config");
  cfg.extra_bundles =
      get_or<std::vector<std::string>>(j, "extra_bundles", {}, "config");
  cfg.dataset = dataset_config_from_json(req(j, "dataset", "config"), "dataset");
  cfg.draws = get_or<Index>(j, "draws", cfg.draws, "config");
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed, "config");
  return cfg;
}

ShrinkCmdConfig shrink_config_from_json(const Json& j) {
  ShrinkCmdConfig cfg;
  cfg.bundle_path = get<std::string>(j, "bundle", "config");
  cfg.dataset = dataset_config_from_json(req(j, "dataset", "config"), "dataset");
  if (j.contains("epsilon") && !j.at("epsilon").is_null())
    cfg.epsilon = get<Scalar>(j, "epsilon", "config");
  return cfg;
}

VerifyLinearizationConfig verify_linearization_config_from_json(const Json& j) {
  VerifyLinearizationConfig cfg;
  cfg.m_grid = get_or<std::vector<Index>>(j, "m_grid", cfg.m_grid, "config");
  cfg.D_slope = get_or<Scalar>(j, "D_slope", cfg.D_slope, "config");
  cfg.D_grid = get_or<std::vector<Scalar>>(j, "D_grid", cfg.D_grid, "config");
  cfg.m_for_D = get_or<Index>(j, "m_for_D", cfg.m_for_D, "config");
  cfg.d = get_or<Index>(j, "d", cfg.d, "config");
  cfg.replicates = get_or<Index>(j, "replicates", cfg.replicates, "config");
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed, "config");
  cfg.slope_lo = get_or<Scalar>(j, "slope_lo", cfg.slope_lo, "config");
  cfg.slope_hi = get_or<Scalar>(j, "slope_hi", cfg.slope_hi, "config");
  cfg.bound_m_grid =
      get_or<std::vector<Index>>(j, "bound_m_grid", cfg.bound_m_grid, "config");
  cfg.bound_replicates =
      get_or<Index>(j, "bound_replicates", cfg.bound_replicates, "config");
  cfg.bound_threshold =
      get_or<Scalar>(j, "bound_threshold", cfg.bound_threshold, "config");
  return cfg;
}

VerifyRegretConfig verify_regret_config_from_json(const Json& j) {
  VerifyRegretConfig cfg;
  cfg.T_grid = get_or<std::vector<Index>>(j, "T_grid", cfg.T_grid, "config");
  cfg.seeds = get_or<int>(j, "seeds", cfg.seeds, "config");
  cfg.bias = get_or<Scalar>(j, "bias", cfg.bias, "config");
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed, "config");
  cfg.slope_lo = get_or<Scalar>(j, "slope_lo", cfg.slope_lo, "config");
  cfg.slope_hi = get_or<Scalar>(j, "slope_hi", cfg.slope_hi, "config");
  return cfg;
}

VerifyBoundConfig verify_bound_config_from_json(const Json& j) {
  VerifyBoundConfig cfg;
  cfg.dataset = dataset_config_from_json(req(j, "dataset", "config"), "dataset");
  cfg.problem = problem_config_from_json(req(j, "problem", "config"), "problem");
  cfg.model = model_config_from_json(req(j, "model", "config"), "model");
  cfg.optimizer =
      optimizer_config_from_json(req(j, "optimizer", "config"), "optimizer");
  cfg.kappas = get_or<std::vector<Scalar>>(j, "kappas", cfg.kappas, "config");
  return cfg;
}

GenDataConfig gen_data_config_from_json(const Json& j) {
  GenDataConfig cfg;
  cfg.n = get_or<Index>(j, "n", cfg.n, "config");
  cfg.d = get_or<Index>(j, "d", cfg.d, "config");
  cfg.bias_gap = get_or<Scalar>(j, "bias_gap", cfg.bias_gap, "config");
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed, "config");
  cfg.csv_out = get<std::string>(j, "csv_out", "config");
  cfg.schema_out = get_or<std::string>(j, "schema_out", "", "config");
  return cfg;
}

}  // namespace conlearn
