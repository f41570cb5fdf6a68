#include "examine/experiments.hpp"

#include <gtest/gtest.h>

#include "examine/errors.hpp"
#include "examine/examine.hpp"
#include "examine/synth.hpp"
#include "examine/valuation.hpp"

namespace examine::experiments {
namespace {

TEST(RankingAuc, SeparatedAndTied) {
  EXPECT_DOUBLE_EQ(ranking_auc({0.9, 0.8}, {0.1, 0.2, 0.3}), 1.0);
  EXPECT_DOUBLE_EQ(ranking_auc({0.1}, {0.9}), 0.0);
  EXPECT_DOUBLE_EQ(ranking_auc({0.5, 0.5}, {0.5}), 0.5);
  EXPECT_DOUBLE_EQ(ranking_auc({0.4, 0.6}, {0.5}), 0.5);
}

TEST(Distribution, SingleLevelHasNoAucTable) {
  ScoreReport r = make_report(Method::random, {"a", "b", "c"}, {0.2, 0.5, 1.0});
  DistributionReport d = score_distribution_report({"a", "b", "c"}, {0.0, 0.0, 0.0}, r);
  ASSERT_EQ(d.levels.size(), 1u);
  EXPECT_TRUE(d.auc.empty());
  EXPECT_EQ(d.levels[0].count, 3u);
  EXPECT_DOUBLE_EQ(d.levels[0].min, 0.2);
  EXPECT_DOUBLE_EQ(d.levels[0].max, 1.0);
  // (0.15, 0.2] is bin 3, (0.45, 0.5] is bin 9, (0.95, 1] is bin 19.
  EXPECT_EQ(d.levels[0].histogram[3], 1u);
  EXPECT_EQ(d.levels[0].histogram[9], 1u);
  EXPECT_EQ(d.levels[0].histogram[19], 1u);
}

TEST(Distribution, SeparatedGroups) {
  ScoreReport r = make_report(Method::random, {"a", "b", "c", "d"}, {0.9, 0.8, 0.2, 0.1});
  DistributionReport d = score_distribution_report({"a", "b", "c", "d"}, {0.0, 0.0, 1.0, 1.0}, r);
  ASSERT_EQ(d.auc.size(), 1u);
  EXPECT_DOUBLE_EQ(d.auc[0].lower_level, 0.0);
  EXPECT_DOUBLE_EQ(d.auc[0].higher_level, 1.0);
  EXPECT_DOUBLE_EQ(d.auc[0].auc, 1.0);
  EXPECT_DOUBLE_EQ(d.levels[0].mean, 0.85);
}

TEST(Distribution, IdMismatchRejected) {
  ScoreReport r = make_report(Method::random, {"a", "b"}, {0.9, 0.8});
  EXPECT_THROW(score_distribution_report({"a", "z"}, {0.0, 0.0}, r), InvalidInput);
}

TEST(Distribution, ExamineMeansDecreaseWithNoise) {
  synth::AssessedSet set = synth::make_assessed_set({}, {}, 0);
  DistributionReport d = score_distribution_report(set, examine_scores(set.data.features()));
  ASSERT_EQ(d.levels.size(), 5u);
  for (std::size_t i = 1; i < d.levels.size(); ++i) EXPECT_LT(d.levels[i].mean, d.levels[i - 1].mean);
}

struct SmallBench {
  synth::Benchmark bench;
  ScoreReport examine;
  ScoreReport random;
  CurveConfig cfg;

  SmallBench() : bench(make()), examine(examine_scores(bench.assessed.data.features())) {
    random = valuation::random_values(bench.assessed.data.rows(), 3, {bench.assessed.data.features().ids()});
    cfg.train.iterations = 100;
    cfg.step = 4;
    cfg.seeds = {0, 1};
  }

  static synth::Benchmark make() {
    synth::CorruptionSpec spec;
    spec.levels = {0.5, 1.0};
    spec.per_level_count = {6, 6};
    spec.clean_count = 6;
    return synth::make_benchmark(spec, {2, 6, 0.5}, {8, 60}, 1);
  }
};

TEST(Curves, SelectionOrders) {
  SmallBench b;
  const LabeledSet& a = b.bench.assessed.data;
  std::vector<std::size_t> high = selection_order(a, b.examine, CurveOrder::high_first, 0);
  std::vector<std::size_t> low = selection_order(a, b.examine, CurveOrder::low_first, 0);
  for (std::size_t i = 0; i < high.size(); ++i) EXPECT_EQ(a.features().ids()[high[i]], b.examine.ranking[i]);
  for (std::size_t i = 1; i < low.size(); ++i) EXPECT_LE(b.examine.scores[low[i - 1]], b.examine.scores[low[i]]);
  EXPECT_EQ(selection_order(a, b.examine, CurveOrder::random, 5), selection_order(a, b.random, CurveOrder::random, 5));
  EXPECT_NE(selection_order(a, b.examine, CurveOrder::random, 5), selection_order(a, b.examine, CurveOrder::random, 6));
}

TEST(Curves, AdditionEndpointsAreOrderIndependent) {
  SmallBench b;
  std::vector<CurveSeries> runs;
  for (CurveOrder order : {CurveOrder::high_first, CurveOrder::low_first, CurveOrder::random}) {
    b.cfg.order = order;
    runs.push_back(run_addition_curve(&b.bench.clean_train, b.bench.assessed.data, b.bench.validation, b.examine, b.cfg));
  }
  const std::vector<std::size_t> expected{0, 4, 8, 12, 16, 18};
  for (const auto& s : runs) {
    ASSERT_EQ(s.points.size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      EXPECT_EQ(s.points[i].n_selected, expected[i]);
      EXPECT_GE(s.points[i].mean_accuracy, 0.0);
      EXPECT_LE(s.points[i].mean_accuracy, 1.0);
    }
    EXPECT_EQ(s.points.front().mean_accuracy, runs[0].points.front().mean_accuracy);
    EXPECT_EQ(s.points.back().mean_accuracy, runs[0].points.back().mean_accuracy);
    EXPECT_EQ(s.points.front().std_accuracy, 0.0);
    EXPECT_EQ(s.mode, CurveMode::add);
    EXPECT_EQ(s.method, "examine");
  }
  const double clean_only = utility::utility_value(b.bench.clean_train, b.bench.validation, b.cfg.train);
  EXPECT_EQ(runs[0].points.front().mean_accuracy, clean_only);
}

TEST(Curves, AdditionWithoutCleanTrainStartsAtChance) {
  SmallBench b;
  CurveSeries s = run_addition_curve(nullptr, b.bench.assessed.data, b.bench.validation, b.examine, b.cfg);
  EXPECT_DOUBLE_EQ(s.points.front().mean_accuracy, 0.5);
}

TEST(Curves, RemovalStartsFromFullModel) {
  SmallBench b;
  std::vector<CurveSeries> runs;
  for (CurveOrder order : {CurveOrder::low_first, CurveOrder::random}) {
    b.cfg.order = order;
    runs.push_back(run_removal_curve(b.bench.assessed.data, b.bench.validation, b.random, b.cfg));
  }
  const std::vector<std::size_t> expected{18, 14, 10, 6, 2};
  const double full = utility::utility_value(b.bench.assessed.data, b.bench.validation, b.cfg.train);
  for (const auto& s : runs) {
    ASSERT_EQ(s.points.size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(s.points[i].n_selected, expected[i]);
    EXPECT_EQ(s.points.front().mean_accuracy, full);
    EXPECT_GE(s.points.back().mean_accuracy, 0.0);
    EXPECT_LE(s.points.back().mean_accuracy, 1.0);
  }
}

TEST(Curves, SingleSeedHasZeroSpread) {
  SmallBench b;
  b.cfg.seeds = {4};
  b.cfg.order = CurveOrder::random;
  CurveSeries s = run_removal_curve(b.bench.assessed.data, b.bench.validation, b.examine, b.cfg);
  for (const auto& p : s.points) EXPECT_EQ(p.std_accuracy, 0.0);
}

TEST(Curves, ThreadsDoNotChangeResults) {
  SmallBench b;
  b.cfg.order = CurveOrder::random;
  CurveSeries one = run_addition_curve(&b.bench.clean_train, b.bench.assessed.data, b.bench.validation, b.examine, b.cfg);
  b.cfg.threads = 4;
  CurveSeries four = run_addition_curve(&b.bench.clean_train, b.bench.assessed.data, b.bench.validation, b.examine, b.cfg);
  for (std::size_t i = 0; i < one.points.size(); ++i) {
    EXPECT_EQ(one.points[i].mean_accuracy, four.points[i].mean_accuracy);
    EXPECT_EQ(one.points[i].std_accuracy, four.points[i].std_accuracy);
  }
}

TEST(Curves, MidCurvePicksNearestPoint) {
  CurveSeries s;
  s.points = {{0, 0.1, 0}, {5, 0.2, 0}, {10, 0.3, 0}, {15, 0.4, 0}};
  EXPECT_DOUBLE_EQ(mid_curve_accuracy(s, 19), 0.3);
  EXPECT_DOUBLE_EQ(mid_curve_accuracy(s, 20), 0.3);
  EXPECT_THROW(mid_curve_accuracy(CurveSeries{}, 10), InvalidInput);
}

TEST(Curves, ConfigValidation) {
  SmallBench b;
  b.cfg.step = 0;
  EXPECT_THROW(run_removal_curve(b.bench.assessed.data, b.bench.validation, b.examine, b.cfg), InvalidInput);
  b.cfg.step = 1;
  b.cfg.seeds.clear();
  EXPECT_THROW(run_removal_curve(b.bench.assessed.data, b.bench.validation, b.examine, b.cfg), InvalidInput);
}

TEST(Timing, EvaluationAccounting) {
  SmallBench b;
  BenchConfig cfg;
  cfg.train.iterations = 50;
  cfg.tmc.max_permutations = 20;
  cfg.tmc.convergence_window = 5;
  TimingReport t = benchmark_timing(b.bench.assessed.data, b.bench.validation,
                                    {Method::examine, Method::loo, Method::shapley_tmc, Method::random}, cfg);
  const std::size_t n = b.bench.assessed.data.rows();
  EXPECT_EQ(t.at(Method::examine).utility_evaluations, 0u);
  EXPECT_EQ(t.at(Method::random).utility_evaluations, 0u);
  EXPECT_EQ(t.at(Method::loo).utility_evaluations, n + 1);
  EXPECT_GT(t.at(Method::shapley_tmc).utility_evaluations, 0u);
  for (const auto& e : t.entries) {
    EXPECT_GE(e.seconds, 0.0);
    EXPECT_EQ(e.report.ids.size(), n);
  }
  EXPECT_THROW(t.at(Method::shapley_exact), InvalidInput);
  EXPECT_THROW(benchmark_timing(b.bench.assessed.data, b.bench.validation, {}, cfg), InvalidInput);
}

TEST(Names, RoundTrip) {
  for (CurveOrder o : {CurveOrder::high_first, CurveOrder::low_first, CurveOrder::random})
    EXPECT_EQ(parse_curve_order(curve_order_name(o)), o);
  EXPECT_EQ(parse_curve_mode("remove"), CurveMode::remove);
  EXPECT_THROW(parse_curve_order("best"), InvalidInput);
}

}  // namespace
}  // namespace examine::experiments
