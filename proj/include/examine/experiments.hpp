#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "examine/feature_matrix.hpp"
#include "examine/score_report.hpp"
#include "examine/synth.hpp"
#include "examine/utility.hpp"
#include "examine/valuation.hpp"

namespace examine::experiments {

constexpr std::size_t kHistogramBins = 20;

struct LevelSummary {
  double level = 0.0;
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
  // Bin b counts scores in (b / 20, (b + 1) / 20]; out-of-range scores are
  // clamped into the first or last bin.
  std::array<std::size_t, kHistogramBins> histogram{};
};

struct LevelAuc {
  double lower_level = 0.0;
  double higher_level = 0.0;
  // P(score of a random lower-level item > score of a random higher-level
  // item), ties counted as one half.
  double auc = 0.0;
};

struct DistributionReport {
  std::vector<LevelSummary> levels;  // ascending by level
  std::vector<LevelAuc> auc;         // every pair lower < higher
};

DistributionReport score_distribution_report(const std::vector<std::string>& ids,
                                             const std::vector<double>& corruption_level,
                                             const ScoreReport& scores);
DistributionReport score_distribution_report(const synth::AssessedSet& assessed, const ScoreReport& scores);

// Probability that a uniformly random element of `higher` scores above a
// uniformly random element of `lower`, ties counted as one half.
double ranking_auc(const std::vector<double>& higher, const std::vector<double>& lower);

enum class CurveMode { add, remove };
enum class CurveOrder { high_first, low_first, random };

std::string_view curve_mode_name(CurveMode mode);
std::string_view curve_order_name(CurveOrder order);
CurveMode parse_curve_mode(std::string_view name);
CurveOrder parse_curve_order(std::string_view name);

struct CurveConfig {
  CurveMode mode = CurveMode::add;
  CurveOrder order = CurveOrder::high_first;
  std::size_t step = 5;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  utility::TrainConfig train;
  unsigned threads = 1;

  void validate() const;
};

struct CurvePoint {
  // Assessed items in the training set at this point.
  std::size_t n_selected = 0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
};

struct CurveSeries {
  std::string method;
  CurveMode mode = CurveMode::add;
  CurveOrder order = CurveOrder::high_first;
  std::vector<CurvePoint> points;
};

// Assessed items in the configured order: high_first is the report ranking,
// low_first sorts by (score ascending, id ascending), random is a seeded
// permutation.
std::vector<std::size_t> selection_order(const LabeledSet& assessed, const ScoreReport& scores, CurveOrder order,
                                         std::uint64_t seed);

// Accuracy on `validation` while assessed items join a model that starts
// from `clean_train` (which may be null for an empty start).
CurveSeries run_addition_curve(const LabeledSet* clean_train, const LabeledSet& assessed,
                               const LabeledSet& validation, const ScoreReport& scores, const CurveConfig& cfg);

// Accuracy while assessed items are removed from a model trained on all of
// them; stops once fewer than `step` items would remain.
CurveSeries run_removal_curve(const LabeledSet& assessed, const LabeledSet& validation, const ScoreReport& scores,
                              const CurveConfig& cfg);

// Mean accuracy at the curve point closest to half the assessed set.
double mid_curve_accuracy(const CurveSeries& series, std::size_t assessed_count);

struct MethodTiming {
  Method method = Method::examine;
  double seconds = 0.0;
  std::size_t utility_evaluations = 0;
  ScoreReport report;
};

struct TimingReport {
  std::vector<MethodTiming> entries;

  const MethodTiming& at(Method method) const;
};

struct BenchConfig {
  utility::TrainConfig train;
  valuation::TmcConfig tmc;
  bool center = false;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

// Wall-clock and utility-evaluation counts for each method on one assessed
// set. Label-free methods report zero evaluations.
TimingReport benchmark_timing(const LabeledSet& assessed, const LabeledSet& validation,
                              const std::vector<Method>& methods, const BenchConfig& cfg);

}  // namespace examine::experiments
