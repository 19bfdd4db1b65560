// Command-line front end: training, evaluation, snapshot shrinking, and the
// verification suites. Exit codes: 0 ok, 2 config error, 3 verification FAIL,
// 4 runtime error.

#include "conlearn/classifier.hpp"
#include "conlearn/config.hpp"
#include "conlearn/linlab.hpp"
#include "conlearn/online.hpp"
#include "conlearn/optimizer.hpp"
#include "conlearn/serialize.hpp"
#include "conlearn/shrink.hpp"
#include "conlearn/svg_plot.hpp"
#include "conlearn/version.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace conlearn;

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  bool plots = false;
};

Json load_config_or_empty(const GlobalArgs& args) {
  if (args.config_path.empty()) return Json::object();
  return load_json(args.config_path);
}

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

Json report_to_json(const EvalReport& r) {
  Json j;
  j["classifier"] = r.classifier;
  j["accuracy"] = r.accuracy;
  j["accuracy_A"] = r.accuracy_a;
  j["accuracy_Ac"] = r.accuracy_ac;
  j["recall_A"] = r.recall_a;
  j["recall_Ac"] = r.recall_ac;
  j["recall_gap"] = r.recall_gap();
  return j;
}

void write_reports_csv(const std::vector<EvalReport>& reports,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  out.precision(10);
  out << "classifier,accuracy,accuracy_A,accuracy_Ac,recall_A,recall_Ac,recall_gap\n";
  for (const auto& r : reports)
    out << r.classifier << "," << r.accuracy << "," << r.accuracy_a << ","
        << r.accuracy_ac << "," << r.recall_a << "," << r.recall_ac << ","
        << r.recall_gap() << "\n";
}

ClassifierBundle make_bundle(const TwoLayerNet& skeleton_src,
                             std::vector<Vector> snapshots,
                             std::vector<Index> ts, Vector probs,
                             Json provenance) {
  TwoLayerNet skeleton(skeleton_src.width(), skeleton_src.input_dim(),
                       skeleton_src.radius(), skeleton_src.seed(),
                       skeleton_src.theta0(), skeleton_src.theta0(),
                       skeleton_src.signs());
  return ClassifierBundle{std::move(skeleton), std::move(snapshots),
                          std::move(ts), std::move(probs), std::move(provenance)};
}

// ---------------------------------------------------------------------------

int cmd_gen_data(const GlobalArgs& args) {
  const GenDataConfig cfg = gen_data_config_from_json(load_config_or_empty(args));
  const Dataset ds =
      generate_biased_synthetic(cfg.n, cfg.d, cfg.bias_gap, cfg.seed);
  write_dataset_csv(ds, cfg.csv_out);
  if (!cfg.schema_out.empty()) {
    const CsvSchema schema = standard_schema(ds.dim(), ds.has_group());
    Json j;
    j["feature_cols"] = schema.feature_cols;
    j["label_col"] = schema.label_col;
    j["label_map"] = schema.label_map;
    if (schema.group_col) {
      j["group_col"] = *schema.group_col;
      j["group_map"] = schema.group_map;
    }
    save_json(j, cfg.schema_out);
  }
  std::cout << "wrote " << ds.rows() << " rows to " << cfg.csv_out
            << " (fingerprint " << dataset_fingerprint(ds) << ")\n";
  return 0;
}

int cmd_train(const GlobalArgs& args) {
  Json config_json = load_config_or_empty(args);
  TrainConfig cfg = train_config_from_json(config_json);
  if (args.seed) cfg.optimizer.seeds = {*args.seed};
  // Validate the dataset source up front, before any compute.
  if (!cfg.dataset.csv_path.empty() && !fs::exists(cfg.dataset.csv_path))
    throw ConfigError("dataset.csv: file not found: " + cfg.dataset.csv_path);

  ensure_dir(args.out_dir);
  save_json(config_json, args.out_dir + "/run_config.json");

  const LoadedData data = load_data(cfg.dataset);
  if (cfg.model.d == 0) cfg.model.d = data.train->dim();
  require(cfg.model.d == data.train->dim(), "model.d != dataset dimension");

  for (const std::uint64_t seed : cfg.optimizer.seeds) {
    const std::string dir = args.out_dir + "/seed_" + std::to_string(seed);
    ensure_dir(dir);

    const ConstraintProblem problem =
        build_problem(cfg.problem, data.train, cfg.model.radius);
    TwoLayerNet net =
        init_net(cfg.model.m, cfg.model.d, cfg.model.radius, cfg.model.seed);
    const RunResult result =
        run(problem, net, optimizer_config(cfg.optimizer, seed));

    trace_to_csv(result.trace, dir + "/trace.csv");

    Json meta;
    meta["version"] = kVersion;
    meta["rng"] = "mt19937_64+polar";
    meta["config_hash"] = json_hash(config_json);
    meta["config"] = config_json;
    meta["seed"] = seed;
    meta["dataset_fingerprint"] = data.fingerprint;
    meta["train_fingerprint"] = dataset_fingerprint(*data.train);
    meta["steps"] = {{"eta_theta", result.steps.eta_theta},
                     {"eta_xi", result.steps.eta_xi},
                     {"eta_lambda", result.steps.eta_lambda}};
    meta["problem"] = problem_config_to_json(cfg.problem);
    meta["model"] = {{"m", cfg.model.m},
                     {"d", cfg.model.d},
                     {"D", cfg.model.radius},
                     {"seed", cfg.model.seed}};
    meta["snapshot_ts"] = result.snapshot_ts;
    save_json(meta, dir + "/run_meta.json");

    Json provenance;
    provenance["config_hash"] = meta["config_hash"];
    provenance["dataset_fingerprint"] = data.fingerprint;
    provenance["train_fingerprint"] = meta["train_fingerprint"];
    provenance["problem"] = meta["problem"];
    provenance["seed"] = seed;
    provenance["version"] = kVersion;

    const Index S = static_cast<Index>(result.snapshots.size());
    const Vector uniform = Vector::Constant(S, 1.0 / static_cast<Scalar>(S));
    Json prov_t = provenance;
    prov_t["classifier"] = "T-Stoch";
    save_bundle(make_bundle(net, result.snapshots, result.snapshot_ts, uniform,
                            prov_t),
                dir + "/tstoch.bundle.json");

    Json prov_last = provenance;
    prov_last["classifier"] = "Last";
    save_bundle(make_bundle(net, {result.last_theta}, {cfg.optimizer.T},
                            Vector::Ones(1), prov_last),
                dir + "/last.bundle.json");

    Json prov_best = provenance;
    prov_best["classifier"] = "Best";
    prov_best["best_objective"] =
        result.trace.rows[static_cast<size_t>(result.best_index)].objective;
    save_bundle(
        make_bundle(net, {result.snapshots[static_cast<size_t>(result.best_index)]},
                    {result.snapshot_ts[static_cast<size_t>(result.best_index)]},
                    Vector::Ones(1), prov_best),
        dir + "/best.bundle.json");

    if (cfg.train_unconstrained_baseline &&
        cfg.problem.preset != "unconstrained") {
      ProblemConfig basecfg = cfg.problem;
      basecfg.preset = "unconstrained";
      const ConstraintProblem baseline =
          build_problem(basecfg, data.train, cfg.model.radius);
      TwoLayerNet bnet =
          init_net(cfg.model.m, cfg.model.d, cfg.model.radius, cfg.model.seed);
      const RunResult bres =
          run(baseline, bnet, optimizer_config(cfg.optimizer, seed));
      Json prov_u = provenance;
      prov_u["classifier"] = "Unconstrained";
      save_bundle(make_bundle(bnet, {bres.last_theta}, {cfg.optimizer.T},
                              Vector::Ones(1), prov_u),
                  dir + "/unconstrained.bundle.json");
      trace_to_csv(bres.trace, dir + "/trace_unconstrained.csv");
    }

    if (args.plots) {
      ensure_dir(dir + "/plots");
      PlotOptions opt;
      opt.title = "training objective";
      opt.xlabel = "t";
      opt.ylabel = "objective";
      plot_csv_columns(dir + "/trace.csv", dir + "/plots/objective.svg", "t",
                       {"objective"}, opt);
      if (problem.num_metrics() > 0) {
        PlotOptions ropt;
        ropt.title = "exact rates";
        ropt.xlabel = "t";
        ropt.ylabel = "rate";
        std::vector<std::string> cols;
        for (Index k = 1; k <= problem.num_metrics(); ++k)
          cols.push_back("r_" + std::to_string(k));
        plot_csv_columns(dir + "/trace.csv", dir + "/plots/rates.svg", "t", cols,
                         ropt);
      }
    }
    std::cout << "seed " << seed << ": " << S << " snapshots, trace in " << dir
              << "\n";
  }
  return 0;
}

int cmd_evaluate(const GlobalArgs& args) {
  const EvaluateConfig cfg = evaluate_config_from_json(load_config_or_empty(args));
  const LoadedData data = load_data(cfg.dataset);
  const Dataset& ds = data.test ? *data.test : *data.train;

  const ClassifierBundle bundle = load_bundle(cfg.bundle_path);
  require(bundle.skeleton.input_dim() == ds.dim(),
          "bundle/dataset dimension mismatch");
  const StochasticClassifier clf = bundle.classifier();

  std::vector<EvalReport> reports;
  reports.push_back(evaluate_expected_score(clf, ds, "T-Stoch (expected score)"));
  reports.push_back(evaluate_mixture(clf, ds, "T-Stoch (mixture exact)"));
  Rng rng(cfg.seed);
  reports.push_back(
      evaluate_sampled(clf, ds, "T-Stoch (sampled)", cfg.draws, rng));

  for (const auto& path : cfg.extra_bundles) {
    const ClassifierBundle extra = load_bundle(path);
    const std::string name =
        extra.provenance.value("classifier", fs::path(path).stem().string());
    if (extra.snapshots.size() == 1) {
      reports.push_back(
          evaluate_single(extra.skeleton, extra.snapshots[0], ds, name));
    } else {
      reports.push_back(evaluate_mixture(extra.classifier(), ds, name));
    }
  }

  ensure_dir(args.out_dir);
  write_reports_csv(reports, args.out_dir + "/evaluate.csv");
  Json j = Json::array();
  for (const auto& r : reports) j.push_back(report_to_json(r));
  Json top;
  top["dataset_fingerprint"] = dataset_fingerprint(ds);
  top["bundle"] = cfg.bundle_path;
  top["reports"] = j;
  save_json(top, args.out_dir + "/evaluate.json");
  for (const auto& r : reports)
    std::cout << r.classifier << ": acc=" << r.accuracy
              << " recall_gap=" << r.recall_gap() << "\n";
  return 0;
}

int cmd_shrink(const GlobalArgs& args) {
  const ShrinkCmdConfig cfg = shrink_config_from_json(load_config_or_empty(args));
  const ClassifierBundle bundle = load_bundle(cfg.bundle_path);
  const LoadedData data = load_data(cfg.dataset);

  if (bundle.provenance.contains("train_fingerprint") &&
      bundle.provenance["train_fingerprint"] !=
          dataset_fingerprint(*data.train)) {
    std::cerr << "warning: dataset fingerprint differs from the bundle's "
                 "training set\n";
  }
  const ProblemConfig pcfg = problem_config_from_json(
      bundle.provenance.at("problem"), "bundle.provenance.problem");
  const ConstraintProblem problem =
      build_problem(pcfg, data.train, bundle.skeleton.radius());

  const ShrinkInstance instance = build_shrink_instance(
      problem, bundle.skeleton, bundle.snapshots, cfg.epsilon);
  const ShrinkResult result = shrink(instance);

  ensure_dir(args.out_dir);
  Json report;
  report["epsilon"] = instance.epsilon;
  report["feasible"] = result.feasible;
  const Index T = instance.num_snapshots();
  const Vector uniform = Vector::Constant(T, 1.0 / static_cast<Scalar>(T));
  report["objective_uniform"] = instance.c0.dot(uniform);
  Json feas_u = Json::array(), feas_p = Json::array();
  for (Index j = 0; j < instance.num_constraints(); ++j)
    feas_u.push_back(instance.cj.row(j).dot(uniform));
  report["constraints_uniform"] = feas_u;

  if (!result.feasible) {
    report["message"] = result.message;
    report["most_violated"] = result.most_violated;
    save_json(report, args.out_dir + "/shrink_report.json");
    std::cerr << result.message << "\n";
    return 4;
  }

  report["objective_shrunk"] = result.objective;
  report["nnz"] = result.nnz;
  for (Index j = 0; j < instance.num_constraints(); ++j)
    feas_p.push_back(instance.cj.row(j).dot(result.p));
  report["constraints_shrunk"] = feas_p;
  save_json(report, args.out_dir + "/shrink_report.json");

  ClassifierBundle shrunk = make_bundle(bundle.skeleton, bundle.snapshots,
                                        bundle.snapshot_ts, result.p,
                                        bundle.provenance);
  shrunk.provenance["classifier"] = "J-Stoch";
  shrunk.provenance["shrink_epsilon"] = instance.epsilon;
  save_bundle(shrunk, args.out_dir + "/jstoch.bundle.json");
  std::cout << "shrunk to " << result.nnz << " snapshots (objective "
            << report["objective_uniform"].get<Scalar>() << " -> "
            << result.objective << ")\n";
  return 0;
}

int cmd_verify_linearization(const GlobalArgs& args) {
  const VerifyLinearizationConfig cfg =
      verify_linearization_config_from_json(load_config_or_empty(args));
  ensure_dir(args.out_dir);

  // Slope vs m at fixed D.
  ScalingExperiment exp;
  exp.m_grid = cfg.m_grid;
  exp.D_grid = {cfg.D_slope};
  exp.d = cfg.d;
  exp.replicates = cfg.replicates;
  exp.seed = cfg.seed;
  const auto cells = estimate_linearization_errors(exp);

  // D sweep at fixed m.
  ScalingExperiment dexp;
  dexp.m_grid = {cfg.m_for_D};
  dexp.D_grid = cfg.D_grid;
  dexp.d = cfg.d;
  dexp.replicates = cfg.replicates;
  dexp.seed = cfg.seed + 1;
  const auto dcells = estimate_linearization_errors(dexp);

  std::vector<std::vector<Scalar>> rows;
  for (const auto& c : cells)
    rows.push_back({static_cast<Scalar>(c.m), c.D, c.mean_sq_dy, c.stderr_sq_dy,
                    c.mean_abs_dy, c.stderr_abs_dy, c.mean_grad_diff,
                    c.stderr_grad_diff});
  for (const auto& c : dcells)
    rows.push_back({static_cast<Scalar>(c.m), c.D, c.mean_sq_dy, c.stderr_sq_dy,
                    c.mean_abs_dy, c.stderr_abs_dy, c.mean_grad_diff,
                    c.stderr_grad_diff});
  write_csv(args.out_dir + "/linearization_cells.csv",
            {"m", "D", "mean_sq_dy", "stderr_sq_dy", "mean_abs_dy",
             "stderr_abs_dy", "mean_grad_diff", "stderr_grad_diff"},
            rows);

  std::vector<Scalar> grid, sq_means, grad_means;
  std::vector<std::vector<Scalar>> sq_cells, grad_cells;
  for (const auto& c : cells) {
    grid.push_back(static_cast<Scalar>(c.m));
    sq_means.push_back(c.mean_sq_dy);
    grad_means.push_back(c.mean_grad_diff);
    sq_cells.push_back(c.sq_samples);
    grad_cells.push_back(c.grad_samples);
  }
  const ScalingFit fit_sq =
      fit_scaling_exponent_bootstrap(grid, sq_cells, 200, cfg.seed + 5);
  const ScalingFit fit_grad =
      fit_scaling_exponent_bootstrap(grid, grad_cells, 200, cfg.seed + 6);

  bool d_monotone = true;
  for (size_t i = 1; i < dcells.size(); ++i)
    if (dcells[i].mean_sq_dy + 1e-12 < dcells[i - 1].mean_sq_dy)
      d_monotone = false;

  // Output boundedness of the init-scale network.
  const auto bcells = estimate_output_bound(
      cfg.bound_m_grid, cfg.d, cfg.bound_replicates, cfg.bound_threshold,
      cfg.seed + 2);
  std::vector<std::vector<Scalar>> brows;
  Scalar bmin = std::numeric_limits<Scalar>::infinity(), bmax = 0.0;
  bool markov_ok = true;
  for (const auto& c : bcells) {
    brows.push_back({static_cast<Scalar>(c.m), c.mean_abs, c.stderr_abs,
                     c.p_exceed, c.stderr_p});
    bmin = std::min(bmin, c.mean_abs);
    bmax = std::max(bmax, c.mean_abs);
    const Scalar markov_rhs = c.mean_abs / cfg.bound_threshold +
                              3.0 * (c.stderr_p + c.stderr_abs / cfg.bound_threshold);
    if (c.p_exceed > markov_rhs) markov_ok = false;
  }
  write_csv(args.out_dir + "/output_bound.csv",
            {"m", "mean_abs_y", "stderr", "p_exceed", "stderr_p"}, brows);

  const bool sq_ok = fit_sq.slope >= cfg.slope_lo && fit_sq.slope <= cfg.slope_hi;
  const bool grad_ok =
      fit_grad.slope >= cfg.slope_lo && fit_grad.slope <= cfg.slope_hi;
  const bool ratio_ok = bmax / bmin <= 2.0;

  Json verdict;
  verdict["slope_sq"] = {{"slope", fit_sq.slope},
                         {"stderr", fit_sq.stderr_slope},
                         {"band", {cfg.slope_lo, cfg.slope_hi}},
                         {"pass", sq_ok}};
  verdict["slope_grad"] = {{"slope", fit_grad.slope},
                           {"stderr", fit_grad.stderr_slope},
                           {"band", {cfg.slope_lo, cfg.slope_hi}},
                           {"pass", grad_ok}};
  verdict["sq_monotone_in_D"] = d_monotone;
  verdict["bound_ratio"] = {{"max_over_min", bmax / bmin}, {"pass", ratio_ok}};
  verdict["markov"] = {{"pass", markov_ok}};
  const bool all =
      sq_ok && grad_ok && d_monotone && ratio_ok && markov_ok;
  verdict["pass"] = all;
  save_json(verdict, args.out_dir + "/linearization_verdict.json");

  if (args.plots) {
    PlotOptions opt;
    opt.title = "linearization error vs width";
    opt.xlabel = "m";
    opt.ylabel = "error";
    opt.log_x = true;
    opt.log_y = true;
    plot_csv_columns(args.out_dir + "/linearization_cells.csv",
                     args.out_dir + "/linearization.svg", "m",
                     {"mean_sq_dy", "mean_grad_diff"}, opt);
  }

  std::cout << "slope E|y-y0|^2 vs m: " << fit_sq.slope << " (band ["
            << cfg.slope_lo << ", " << cfg.slope_hi << "]) "
            << (sq_ok ? "PASS" : "FAIL") << "\n";
  std::cout << "slope E|grad dy| vs m: " << fit_grad.slope << " "
            << (grad_ok ? "PASS" : "FAIL") << "\n";
  std::cout << "E|y| max/min ratio: " << bmax / bmin << " "
            << (ratio_ok ? "PASS" : "FAIL") << "\n";
  return all ? 0 : 3;
}

int cmd_verify_regret(const GlobalArgs& args) {
  const VerifyRegretConfig cfg =
      verify_regret_config_from_json(load_config_or_empty(args));
  ensure_dir(args.out_dir);

  QuadraticFamilyConfig base;
  base.seed = cfg.seed;
  const SlopeExperimentResult res =
      regret_slope_experiment(base, cfg.T_grid, cfg.seeds);

  bool bound_ok = true;
  std::vector<std::vector<Scalar>> rows;
  for (size_t i = 0; i < res.grid.size(); ++i) {
    if (res.mean_regret[i] > res.mean_bound[i]) bound_ok = false;
    rows.push_back({static_cast<Scalar>(res.grid[i]), res.mean_regret[i],
                    res.stderr_regret[i], res.mean_bound[i]});
  }
  write_csv(args.out_dir + "/regret_grid.csv",
            {"T", "mean_regret", "stderr", "regret_bound"}, rows);

  const bool slope_ok =
      res.fit.slope >= cfg.slope_lo && res.fit.slope <= cfg.slope_hi;

  // Bias plateau: the same family with a constant bias injector.
  auto biased_mean = [&](Index T) {
    Scalar acc = 0.0;
    for (int s = 0; s < cfg.seeds; ++s) {
      QuadraticFamilyConfig b = base;
      b.T = T;
      b.bias = cfg.bias;
      b.seed = cfg.seed + static_cast<std::uint64_t>(s);
      acc += run_quadratic_family(b).average_regret;
    }
    return acc / cfg.seeds;
  };
  const Scalar r9 = biased_mean(512);
  const Scalar r13 = biased_mean(8192);
  const bool plateau_ok = r13 > 0.5 * r9;

  Json verdict;
  verdict["slope"] = {{"slope", res.fit.slope},
                      {"stderr", res.fit.stderr_slope},
                      {"band", {cfg.slope_lo, cfg.slope_hi}},
                      {"pass", slope_ok}};
  verdict["regret_bound_all_T"] = bound_ok;
  verdict["bias_plateau"] = {{"regret_T512", r9},
                             {"regret_T8192", r13},
                             {"ratio", r13 / r9},
                             {"pass", plateau_ok}};
  const bool all = bound_ok && slope_ok && plateau_ok;
  verdict["pass"] = all;
  save_json(verdict, args.out_dir + "/regret_verdict.json");

  if (args.plots) {
    PlotOptions opt;
    opt.title = "average regret vs horizon";
    opt.xlabel = "T";
    opt.ylabel = "avg regret";
    opt.log_x = true;
    opt.log_y = true;
    plot_csv_columns(args.out_dir + "/regret_grid.csv",
                     args.out_dir + "/regret.svg", "T",
                     {"mean_regret", "regret_bound"}, opt);
  }

  std::cout << "regret slope: " << res.fit.slope << " "
            << (slope_ok ? "PASS" : "FAIL") << "; bound "
            << (bound_ok ? "PASS" : "FAIL") << "; plateau ratio " << r13 / r9
            << " " << (plateau_ok ? "PASS" : "FAIL") << "\n";
  return all ? 0 : 3;
}

int cmd_verify_bound(const GlobalArgs& args) {
  Json config_json = load_config_or_empty(args);
  if (!config_json.contains("dataset"))
    throw ConfigError("verify-bound needs a full training config "
                      "(dataset/problem/model/optimizer)");
  VerifyBoundConfig cfg = verify_bound_config_from_json(config_json);
  ensure_dir(args.out_dir);

  const LoadedData data = load_data(cfg.dataset);
  if (cfg.model.d == 0) cfg.model.d = data.train->dim();

  std::vector<std::vector<Scalar>> rows;
  std::vector<Scalar> means, ses;
  for (const Scalar kappa : cfg.kappas) {
    std::vector<Scalar> feas;
    for (const std::uint64_t seed : cfg.optimizer.seeds) {
      ProblemConfig pcfg = cfg.problem;
      pcfg.kappa = kappa;
      const ConstraintProblem problem =
          build_problem(pcfg, data.train, cfg.model.radius);
      TwoLayerNet net =
          init_net(cfg.model.m, cfg.model.d, cfg.model.radius, cfg.model.seed);
      const RunResult result =
          run(problem, net, optimizer_config(cfg.optimizer, seed));
      const Vector avg = result.trace.average_rates();
      feas.push_back(eval_outers(problem, avg).maxCoeff());
    }
    Scalar mean = 0.0;
    for (const Scalar v : feas) mean += v;
    mean /= static_cast<Scalar>(feas.size());
    Scalar var = 0.0;
    for (const Scalar v : feas) var += (v - mean) * (v - mean);
    const Scalar se =
        feas.size() > 1
            ? std::sqrt(var / static_cast<Scalar>(feas.size() - 1) /
                        static_cast<Scalar>(feas.size()))
            : 0.0;
    means.push_back(mean);
    ses.push_back(se);
    rows.push_back({kappa, mean, se});
    std::cout << "kappa=" << kappa << ": max_j g_j(avg rates) = " << mean
              << " +- " << se << "\n";
  }
  write_csv(args.out_dir + "/kappa_sweep.csv",
            {"kappa", "max_g_mean", "stderr"}, rows);

  // Non-increasing up to one inversion within one standard error.
  int inversions = 0;
  bool within_se = true;
  for (size_t i = 1; i < means.size(); ++i) {
    if (means[i] > means[i - 1]) {
      ++inversions;
      const Scalar tol = std::max(ses[i], ses[i - 1]);
      if (means[i] - means[i - 1] > tol) within_se = false;
    }
  }
  const bool pass = inversions <= 1 && within_se;
  Json verdict;
  verdict["kappas"] = cfg.kappas;
  verdict["max_g_means"] = means;
  verdict["stderrs"] = ses;
  verdict["inversions"] = inversions;
  verdict["pass"] = pass;
  save_json(verdict, args.out_dir + "/kappa_verdict.json");
  std::cout << "kappa trend: " << (pass ? "PASS" : "FAIL") << " (" << inversions
            << " inversion(s))\n";
  return pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained neural classifier training via the "
               "surrogate-Lagrangian minimax game"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalArgs args;
  app.add_option("--config", args.config_path, "JSON config file")
      ->expected(1);
  app.add_option("--out", args.out_dir, "output directory");
  std::uint64_t seed_opt = 0;
  auto* seed_flag = app.add_option("--seed", seed_opt, "override run seed");
  app.add_flag("--plots", args.plots, "emit SVG plots next to the CSVs");

  auto* c_train = app.add_subcommand("train", "train a constrained classifier");
  auto* c_eval = app.add_subcommand("evaluate", "evaluate classifier bundles");
  auto* c_shrink =
      app.add_subcommand("shrink", "compress a bundle to <= J+1 snapshots");
  auto* c_vlin = app.add_subcommand("verify-linearization",
                                    "width-scaling verification suite");
  auto* c_vreg =
      app.add_subcommand("verify-regret", "online-regret verification suite");
  auto* c_vbound =
      app.add_subcommand("verify-bound", "kappa-feasibility trend suite");
  auto* c_gen = app.add_subcommand("gen-data", "emit synthetic biased data");

  CLI11_PARSE(app, argc, argv);
  if (seed_flag->count() > 0) args.seed = seed_opt;

  try {
    if (c_train->parsed()) return cmd_train(args);
    if (c_eval->parsed()) return cmd_evaluate(args);
    if (c_shrink->parsed()) return cmd_shrink(args);
    if (c_vlin->parsed()) return cmd_verify_linearization(args);
    if (c_vreg->parsed()) return cmd_verify_regret(args);
    if (c_vbound->parsed()) return cmd_verify_bound(args);
    if (c_gen->parsed()) return cmd_gen_data(args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const TrainingError& e) {
    std::cerr << "training aborted: " << e.what() << "\n";
    trace_to_csv(e.trace, args.out_dir + "/trace_partial.csv");
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
