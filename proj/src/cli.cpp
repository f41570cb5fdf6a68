#include "examine/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>

#include <CLI11.hpp>

#include "examine/config.hpp"
#include "examine/dataio.hpp"
#include "examine/errors.hpp"
#include "examine/examine.hpp"
#include "examine/experiments.hpp"
#include "examine/rng.hpp"
#include "examine/synth.hpp"
#include "examine/theory.hpp"
#include "examine/valuation.hpp"

namespace examine::cli {
namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string format = "csv";
  bool quiet = false;
  unsigned threads = 1;
  std::string timestamp;
  CLI::Option* seed_option = nullptr;
};

struct Context {
  const GlobalOptions& global;
  std::ostream& out;
  std::ostream& err;

  void info(const std::string& msg) const {
    if (!global.quiet) err << msg << '\n';
  }
  std::string timestamp() const { return global.timestamp.empty() ? utc_timestamp() : global.timestamp; }
  dataio::FileFormat format() const { return dataio::parse_format(global.format); }
  bool seed_given() const { return global.seed_option != nullptr && global.seed_option->count() > 0; }
};

void save_report(const Context& ctx, ScoreReport report, const std::string& path) {
  report.created_at = ctx.timestamp();
  dataio::write_report(report, path);
  ctx.info("wrote " + std::string(method_name(report.method)) + " report for " + std::to_string(report.ids.size()) +
           " items to " + path);
}

// Aligns the class count of two labeled sets.
std::pair<LabeledSet, LabeledSet> same_classes(LabeledSet a, LabeledSet b) {
  const int k = std::max(a.num_classes(), b.num_classes());
  return {LabeledSet(a.features(), a.labels(), k), LabeledSet(b.features(), b.labels(), k)};
}

struct SupervisedArgs {
  std::string train_path, test_path, out_path;
  double learning_rate = 0.1;
  int iterations = 500;
  double l2 = 1e-4;
  std::size_t tmc_max_permutations = 2000;
  double tmc_tolerance = 0.01;
  double tmc_threshold = 0.05;
  std::size_t tmc_window = 100;
};

void add_supervised_options(CLI::App* cmd, SupervisedArgs& a, bool tmc) {
  cmd->add_option("--train", a.train_path, "Labeled training features")->required();
  cmd->add_option("--test", a.test_path, "Labeled test features")->required();
  cmd->add_option("--out", a.out_path, "Output report (JSON)")->required();
  cmd->add_option("--lr", a.learning_rate, "Logistic regression learning rate");
  cmd->add_option("--iterations", a.iterations, "Gradient descent iterations");
  cmd->add_option("--l2", a.l2, "L2 penalty");
  if (tmc) {
    cmd->add_option("--tmc-max-permutations", a.tmc_max_permutations, "Permutation budget");
    cmd->add_option("--tmc-tolerance", a.tmc_tolerance, "Truncation tolerance (utility units)");
    cmd->add_option("--tmc-threshold", a.tmc_threshold, "Convergence threshold");
    cmd->add_option("--tmc-window", a.tmc_window, "Convergence window (permutations)");
  }
}

int run_supervised(const Context& ctx, Method method, const SupervisedArgs& a) {
  auto [train, test] = same_classes(dataio::read_labeled_set(a.train_path), dataio::read_labeled_set(a.test_path));
  const std::size_t n = train.rows();
  if (method == Method::shapley_exact && n > valuation::kMaxExactShapleyPlayers) {
    throw SizeLimitError("exact Shapley enumeration is limited to N <= " +
                         std::to_string(valuation::kMaxExactShapleyPlayers) + " items (got N = " + std::to_string(n) +
                         ")");
  }
  utility::TrainConfig cfg{a.learning_rate, a.iterations, a.l2, ctx.global.seed};
  valuation::ValuationOptions options{train.features().ids(), ctx.global.threads};
  valuation::UtilityFunction v = valuation::logistic_utility(train, test, cfg);
  ScoreReport report;
  if (method == Method::loo) {
    report = valuation::loo_values(n, v, options);
  } else if (method == Method::shapley_exact) {
    report = valuation::shapley_exact(n, v, options);
  } else {
    valuation::TmcConfig tmc{a.tmc_max_permutations, a.tmc_tolerance, a.tmc_threshold, a.tmc_window, ctx.global.seed};
    report = valuation::shapley_tmc(n, v, tmc, options);
  }
  report.params["utility"] = cfg.digest();
  report.seed = ctx.global.seed;
  save_report(ctx, std::move(report), a.out_path);
  return kOk;
}

int run_synth_gen(const Context& ctx, const std::string& config_path, const std::string& out_dir) {
  RunConfig cfg = read_config(config_path);
  const std::uint64_t seed = ctx.seed_given() ? ctx.global.seed : cfg.seed;
  synth::Benchmark bench = synth::make_benchmark(cfg.corruption, cfg.clusters, cfg.splits, seed);
  fs::create_directories(out_dir);
  const dataio::FileFormat format = ctx.format();
  const std::string ext = format == dataio::FileFormat::exmf ? ".exmf" : ".csv";
  const fs::path dir(out_dir);
  dataio::write_features(bench.assessed.data, dir / ("assessed" + ext), format);
  dataio::write_truth(bench.assessed, dir / "truth.csv");
  dataio::write_features(bench.clean_train, dir / ("clean_train" + ext), format);
  dataio::write_features(bench.validation, dir / ("validation" + ext), format);
  ctx.info("wrote assessed (" + std::to_string(bench.assessed.data.rows()) + "), clean_train (" +
           std::to_string(bench.clean_train.rows()) + "), validation (" + std::to_string(bench.validation.rows()) +
           ") and truth.csv to " + out_dir);
  return kOk;
}

struct CurveArgs {
  std::string scores, assessed, clean_train, validation, config, out, order;
};

int run_curve(const Context& ctx, experiments::CurveMode mode, const CurveArgs& a) {
  RunConfig cfg = a.config.empty() ? RunConfig{} : read_config(a.config);
  ScoreReport scores = dataio::read_report(a.scores);
  LabeledSet assessed = dataio::read_labeled_set(a.assessed);
  LabeledSet validation = dataio::read_labeled_set(a.validation);
  std::optional<LabeledSet> clean;
  if (!a.clean_train.empty()) clean = dataio::read_labeled_set(a.clean_train);
  int k = std::max(assessed.num_classes(), validation.num_classes());
  if (clean) k = std::max(k, clean->num_classes());
  assessed = LabeledSet(assessed.features(), assessed.labels(), k);
  validation = LabeledSet(validation.features(), validation.labels(), k);
  if (clean) clean = LabeledSet(clean->features(), clean->labels(), k);

  experiments::CurveConfig curve;
  curve.mode = mode;
  curve.step = cfg.curve_step;
  curve.seeds = cfg.curve_seeds;
  curve.train = cfg.train;
  curve.threads = ctx.global.threads;
  if (!a.order.empty()) {
    curve.order = experiments::parse_curve_order(a.order);
  } else if (cfg.curve_order) {
    curve.order = *cfg.curve_order;
  } else {
    curve.order = mode == experiments::CurveMode::add ? experiments::CurveOrder::high_first
                                                      : experiments::CurveOrder::low_first;
  }
  experiments::CurveSeries series =
      mode == experiments::CurveMode::add
          ? experiments::run_addition_curve(clean ? &*clean : nullptr, assessed, validation, scores, curve)
          : experiments::run_removal_curve(assessed, validation, scores, curve);
  dataio::write_curve(series, a.out);
  ctx.info("wrote " + std::to_string(series.points.size()) + " curve points to " + a.out);
  return kOk;
}

struct TheoryArgs {
  std::size_t d1 = 6, d2 = 5, k = 3, trials = 100;
};

int run_theory(const Context& ctx, const TheoryArgs& a) {
  constexpr double kResidualLimit = 1e-10;
  double max_reconstruction = 0.0, max_recovery = 0.0;
  std::size_t min_rank = a.k;
  std::size_t rank_deficient = 0;
  bool all_ci = true;
  for (std::size_t t = 0; t < a.trials; ++t) {
    theory::DiscreteJoint joint = theory::make_ci_joint(a.d1, a.d2, a.k, mix_seed(ctx.global.seed, t));
    theory::TheoremReport r = theory::verify_theorem(joint);
    max_reconstruction = std::max(max_reconstruction, r.reconstruction_residual);
    if (r.recovery_residual) {
      max_recovery = std::max(max_recovery, *r.recovery_residual);
    } else {
      ++rank_deficient;
    }
    min_rank = std::min(min_rank, r.a_rank);
    all_ci = all_ci && r.ci_holds;
  }
  const bool pass = max_reconstruction < kResidualLimit && max_recovery < kResidualLimit;
  nlohmann::ordered_json doc;
  doc["d1"] = a.d1;
  doc["d2"] = a.d2;
  doc["k"] = a.k;
  doc["trials"] = a.trials;
  doc["seed"] = ctx.global.seed;
  doc["max_reconstruction_residual"] = max_reconstruction;
  doc["max_recovery_residual"] = max_recovery;
  doc["max_residual"] = std::max(max_reconstruction, max_recovery);
  doc["rank_deficient_trials"] = rank_deficient;
  doc["min_a_rank"] = min_rank;
  doc["ci_holds_all"] = all_ci;
  doc["pass"] = pass;
  ctx.out << dataio::dump(doc);
  ctx.info(std::string("theorem check ") + (pass ? "passed" : "FAILED"));
  return pass ? kOk : kNumericalError;
}

int run_bench(const Context& ctx, const std::string& config_path, const std::string& out_path) {
  RunConfig cfg = read_config(config_path);
  const std::uint64_t seed = ctx.seed_given() ? ctx.global.seed : cfg.seed;
  synth::Benchmark bench = synth::make_benchmark(cfg.corruption, cfg.clusters, cfg.splits, seed);
  experiments::BenchConfig bc{cfg.train, cfg.tmc, cfg.center, seed, ctx.global.threads};
  bc.tmc.seed = seed;
  ctx.info("timing " + std::to_string(cfg.bench_methods.size()) + " methods on " +
           std::to_string(bench.assessed.data.rows()) + " x " + std::to_string(bench.assessed.data.cols()) +
           " features");
  experiments::TimingReport timing =
      experiments::benchmark_timing(bench.assessed.data, bench.validation, cfg.bench_methods, bc);
  const std::string text = dataio::dump(dataio::timing_to_json(timing));
  ctx.out << text;
  if (!out_path.empty()) dataio::write_text(out_path, text);
  return kOk;
}

int run_report_dist(const Context& ctx, const std::string& scores_path, const std::string& truth_path,
                    const std::string& out_path) {
  ScoreReport scores = dataio::read_report(scores_path);
  dataio::Truth truth = dataio::read_truth(truth_path);
  experiments::DistributionReport dist =
      experiments::score_distribution_report(truth.ids, truth.corruption_level, scores);
  const std::string text = dataio::dump(dataio::distribution_to_json(dist));
  if (out_path.empty()) {
    ctx.out << text;
  } else {
    dataio::write_text(out_path, text);
    ctx.info("wrote score distribution to " + out_path);
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Label-free data valuation (EXAMINE) with supervised baselines", "examine"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  global.seed_option = app.add_option("--seed", global.seed, "Random seed");
  app.add_option("--format", global.format, "Feature file format for outputs")
      ->check(CLI::IsMember({"csv", "exmf"}));
  app.add_flag("--quiet", global.quiet, "Suppress informational messages");
  app.add_option("--threads", global.threads, "Cap on worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--timestamp", global.timestamp, "Fixed created_at value for reports");

  Context ctx{global, out, err};
  std::function<int()> action;

  CLI::App* score = app.add_subcommand("score", "Compute per-item valuation scores")->require_subcommand(1);

  std::string features_path, examine_out;
  bool center = false;
  CLI::App* examine_cmd = score->add_subcommand("examine", "Label-free EXAMINE scores");
  examine_cmd->add_option("--features", features_path, "Feature file (CSV or EXMF)")->required();
  examine_cmd->add_flag("--center", center, "Mean-center features before the spectral computation");
  examine_cmd->add_option("--out", examine_out, "Output report (JSON)")->required();
  examine_cmd->callback([&] {
    action = [&] {
      FeatureMatrix features = dataio::read_feature_matrix(features_path);
      save_report(ctx, examine_scores(features, {center, global.threads}), examine_out);
      return kOk;
    };
  });

  SupervisedArgs loo_args, exact_args, tmc_args;
  CLI::App* loo_cmd = score->add_subcommand("loo", "Leave-one-out retraining values");
  add_supervised_options(loo_cmd, loo_args, false);
  loo_cmd->callback([&] { action = [&] { return run_supervised(ctx, Method::loo, loo_args); }; });
  CLI::App* exact_cmd = score->add_subcommand("shapley-exact", "Exact Shapley values (N <= 20)");
  add_supervised_options(exact_cmd, exact_args, false);
  exact_cmd->callback([&] { action = [&] { return run_supervised(ctx, Method::shapley_exact, exact_args); }; });
  CLI::App* tmc_cmd = score->add_subcommand("shapley-tmc", "Truncated Monte Carlo Shapley values");
  add_supervised_options(tmc_cmd, tmc_args, true);
  tmc_cmd->callback([&] { action = [&] { return run_supervised(ctx, Method::shapley_tmc, tmc_args); }; });

  std::size_t random_n = 0;
  std::string random_out;
  CLI::App* random_cmd = score->add_subcommand("random", "Uniform random baseline scores");
  random_cmd->add_option("--n", random_n, "Item count")->required()->check(CLI::PositiveNumber);
  random_cmd->add_option("--out", random_out, "Output report (JSON)")->required();
  random_cmd->callback([&] {
    action = [&] {
      save_report(ctx, valuation::random_values(random_n, global.seed), random_out);
      return kOk;
    };
  });

  CLI::App* synth_cmd = app.add_subcommand("synth", "Synthetic benchmark generation")->require_subcommand(1);
  std::string synth_config, synth_out;
  CLI::App* gen_cmd = synth_cmd->add_subcommand("gen", "Generate clean-train, assessed and validation sets");
  gen_cmd->add_option("--config", synth_config, "Run configuration (JSON)")->required();
  gen_cmd->add_option("--out", synth_out, "Output directory")->required();
  gen_cmd->callback([&] { action = [&] { return run_synth_gen(ctx, synth_config, synth_out); }; });

  CLI::App* curve_cmd = app.add_subcommand("curve", "Add/remove accuracy curves")->require_subcommand(1);
  CurveArgs add_args, remove_args;
  auto add_curve_options = [](CLI::App* cmd, CurveArgs& a, bool with_clean) {
    cmd->add_option("--scores", a.scores, "Score report (JSON)")->required();
    cmd->add_option("--assessed", a.assessed, "Labeled assessed features")->required();
    if (with_clean) cmd->add_option("--clean-train", a.clean_train, "Labeled clean training features");
    cmd->add_option("--validation", a.validation, "Labeled validation features")->required();
    cmd->add_option("--config", a.config, "Run configuration (JSON)");
    cmd->add_option("--order", a.order, "high_first, low_first or random")
        ->check(CLI::IsMember({"high_first", "low_first", "random"}));
    cmd->add_option("--out", a.out, "Output curve (.json or .csv)")->required();
  };
  CLI::App* add_cmd = curve_cmd->add_subcommand("add", "Add assessed items to a clean-train model");
  add_curve_options(add_cmd, add_args, true);
  add_cmd->callback([&] { action = [&] { return run_curve(ctx, experiments::CurveMode::add, add_args); }; });
  CLI::App* remove_cmd = curve_cmd->add_subcommand("remove", "Remove assessed items from a full model");
  add_curve_options(remove_cmd, remove_args, false);
  remove_cmd->callback([&] { action = [&] { return run_curve(ctx, experiments::CurveMode::remove, remove_args); }; });

  CLI::App* theory_cmd = app.add_subcommand("theory", "Representation theorem checks")->require_subcommand(1);
  TheoryArgs theory_args;
  CLI::App* check_cmd = theory_cmd->add_subcommand("check", "Verify the theorem on seeded CI joints");
  check_cmd->add_option("--d1", theory_args.d1, "Support size of X1");
  check_cmd->add_option("--d2", theory_args.d2, "Support size of X2");
  check_cmd->add_option("--k", theory_args.k, "Class count");
  check_cmd->add_option("--trials", theory_args.trials, "Number of joints");
  check_cmd->callback([&] { action = [&] { return run_theory(ctx, theory_args); }; });

  std::string bench_config, bench_out;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Wall-clock comparison of valuation methods");
  bench_cmd->add_option("--config", bench_config, "Run configuration (JSON)")->required();
  bench_cmd->add_option("--out", bench_out, "Also write the timing report here");
  bench_cmd->callback([&] { action = [&] { return run_bench(ctx, bench_config, bench_out); }; });

  CLI::App* report_cmd = app.add_subcommand("report", "Summaries of score reports")->require_subcommand(1);
  std::string dist_scores, dist_truth, dist_out;
  CLI::App* dist_cmd = report_cmd->add_subcommand("dist", "Score distribution per corruption level");
  dist_cmd->add_option("--scores", dist_scores, "Score report (JSON)")->required();
  dist_cmd->add_option("--truth", dist_truth, "Ground-truth sidecar (truth.csv)")->required();
  dist_cmd->add_option("--out", dist_out, "Output (JSON); stdout when omitted");
  dist_cmd->callback([&] { action = [&] { return run_report_dist(ctx, dist_scores, dist_truth, dist_out); }; });

  for (CLI::App* sub : {score, synth_cmd, curve_cmd, theory_cmd, report_cmd}) sub->fallthrough();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  }

  try {
    if (!action) {
      err << app.help();
      return kUsageError;
    }
    return action();
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << '\n';
    return kUsageError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kNumericalError;
  }
}

}  // namespace examine::cli
