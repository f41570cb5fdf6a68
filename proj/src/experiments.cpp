#include "examine/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include "examine/errors.hpp"
#include "examine/examine.hpp"
#include "examine/parallel.hpp"
#include "examine/rng.hpp"

namespace examine::experiments {
namespace {

std::vector<double> scores_for(const std::vector<std::string>& ids, const ScoreReport& report) {
  std::unordered_map<std::string, double> lookup;
  lookup.reserve(report.ids.size());
  for (std::size_t i = 0; i < report.ids.size(); ++i) lookup.emplace(report.ids[i], report.scores[i]);
  std::vector<double> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = lookup.find(id);
    if (it == lookup.end()) throw InvalidInput("score report has no entry for item '" + id + "'");
    out.push_back(it->second);
  }
  return out;
}

struct SeedStats {
  double mean;
  double stddev;
};

SeedStats summarize(const std::vector<double>& values) {
  double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return {mean, std::sqrt(var)};
}

// accuracy[seed][point] -> aggregated points.
std::vector<CurvePoint> aggregate(const std::vector<std::size_t>& n_selected,
                                  const std::vector<std::vector<double>>& accuracy) {
  std::vector<CurvePoint> points;
  points.reserve(n_selected.size());
  for (std::size_t p = 0; p < n_selected.size(); ++p) {
    std::vector<double> column;
    column.reserve(accuracy.size());
    for (const auto& per_seed : accuracy) column.push_back(per_seed[p]);
    SeedStats stats = summarize(column);
    points.push_back({n_selected[p], stats.mean, stats.stddev});
  }
  return points;
}

}  // namespace

double ranking_auc(const std::vector<double>& higher, const std::vector<double>& lower) {
  if (higher.empty() || lower.empty()) throw InvalidInput("AUC needs two nonempty groups");
  double wins = 0.0;
  for (double h : higher) {
    for (double l : lower) {
      if (h > l) {
        wins += 1.0;
      } else if (h == l) {
        wins += 0.5;
      }
    }
  }
  return wins / (static_cast<double>(higher.size()) * static_cast<double>(lower.size()));
}

DistributionReport score_distribution_report(const std::vector<std::string>& ids,
                                             const std::vector<double>& corruption_level,
                                             const ScoreReport& scores) {
  if (ids.size() != corruption_level.size()) throw InvalidInput("ids and corruption levels differ in length");
  if (scores.ids.size() != ids.size()) {
    throw InvalidInput("score report covers " + std::to_string(scores.ids.size()) + " items, assessed set has " +
                       std::to_string(ids.size()));
  }
  const std::vector<double> values = scores_for(ids, scores);
  std::map<double, std::vector<double>> groups;
  for (std::size_t i = 0; i < ids.size(); ++i) groups[corruption_level[i]].push_back(values[i]);

  DistributionReport report;
  for (const auto& [level, group] : groups) {
    LevelSummary s;
    s.level = level;
    s.count = group.size();
    SeedStats stats = summarize(group);
    s.mean = stats.mean;
    s.stddev = stats.stddev;
    s.min = *std::min_element(group.begin(), group.end());
    s.max = *std::max_element(group.begin(), group.end());
    for (double v : group) {
      long bin = static_cast<long>(std::ceil(v * static_cast<double>(kHistogramBins))) - 1;
      bin = std::clamp<long>(bin, 0, static_cast<long>(kHistogramBins) - 1);
      ++s.histogram[static_cast<std::size_t>(bin)];
    }
    report.levels.push_back(s);
  }
  for (auto lo = groups.begin(); lo != groups.end(); ++lo) {
    for (auto hi = std::next(lo); hi != groups.end(); ++hi) {
      report.auc.push_back({lo->first, hi->first, ranking_auc(lo->second, hi->second)});
    }
  }
  return report;
}

DistributionReport score_distribution_report(const synth::AssessedSet& assessed, const ScoreReport& scores) {
  return score_distribution_report(assessed.data.features().ids(), assessed.corruption_level, scores);
}

std::string_view curve_mode_name(CurveMode mode) { return mode == CurveMode::add ? "add" : "remove"; }

std::string_view curve_order_name(CurveOrder order) {
  switch (order) {
    case CurveOrder::high_first: return "high_first";
    case CurveOrder::low_first: return "low_first";
    case CurveOrder::random: return "random";
  }
  return "unknown";
}

CurveMode parse_curve_mode(std::string_view name) {
  if (name == "add") return CurveMode::add;
  if (name == "remove") return CurveMode::remove;
  throw InvalidInput("unknown curve mode '" + std::string(name) + "'");
}

CurveOrder parse_curve_order(std::string_view name) {
  for (CurveOrder o : {CurveOrder::high_first, CurveOrder::low_first, CurveOrder::random}) {
    if (curve_order_name(o) == name) return o;
  }
  throw InvalidInput("unknown curve order '" + std::string(name) + "'");
}

void CurveConfig::validate() const {
  if (step < 1) throw InvalidInput("curve step must be at least 1");
  if (seeds.empty()) throw InvalidInput("curve needs at least one seed");
  train.validate();
}

std::vector<std::size_t> selection_order(const LabeledSet& assessed, const ScoreReport& scores, CurveOrder order,
                                         std::uint64_t seed) {
  const auto& ids = assessed.features().ids();
  const std::vector<double> values = scores_for(ids, scores);
  if (order == CurveOrder::random) return Rng(mix_seed(seed, 7)).permutation(ids.size());
  std::vector<std::size_t> idx(ids.size());
  std::iota(idx.begin(), idx.end(), 0);
  const bool descending = order == CurveOrder::high_first;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return descending ? values[a] > values[b] : values[a] < values[b];
    return ids[a] < ids[b];
  });
  return idx;
}

CurveSeries run_addition_curve(const LabeledSet* clean_train, const LabeledSet& assessed,
                               const LabeledSet& validation, const ScoreReport& scores, const CurveConfig& cfg) {
  cfg.validate();
  if (assessed.cols() != validation.cols() || (clean_train != nullptr && clean_train->cols() != assessed.cols())) {
    throw InvalidInput("curve inputs have mismatched feature dimensions");
  }
  const LabeledSet pool = clean_train != nullptr ? concat(*clean_train, assessed) : assessed;
  const std::size_t offset = clean_train != nullptr ? clean_train->rows() : 0;
  const std::size_t n = assessed.rows();

  std::vector<std::size_t> n_selected;
  for (std::size_t t = 0;; ++t) {
    std::size_t k = std::min(t * cfg.step, n);
    n_selected.push_back(k);
    if (k == n) break;
  }

  std::vector<std::vector<double>> accuracy(cfg.seeds.size(), std::vector<double>(n_selected.size()));
  for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
    const std::vector<std::size_t> order = selection_order(assessed, scores, cfg.order, cfg.seeds[s]);
    utility::TrainConfig train = cfg.train;
    train.seed = cfg.seeds[s];
    parallel_for(n_selected.size(), cfg.threads, [&](std::size_t p) {
      std::vector<std::size_t> rows(offset);
      std::iota(rows.begin(), rows.end(), 0);
      for (std::size_t j = 0; j < n_selected[p]; ++j) rows.push_back(offset + order[j]);
      accuracy[s][p] = utility::utility_value(pool, rows, validation, train);
    });
  }
  return CurveSeries{std::string(method_name(scores.method)), CurveMode::add, cfg.order,
                     aggregate(n_selected, accuracy)};
}

CurveSeries run_removal_curve(const LabeledSet& assessed, const LabeledSet& validation, const ScoreReport& scores,
                              const CurveConfig& cfg) {
  cfg.validate();
  if (assessed.cols() != validation.cols()) throw InvalidInput("curve inputs have mismatched feature dimensions");
  const std::size_t n = assessed.rows();
  std::vector<std::size_t> removed;
  for (std::size_t t = 0; t * cfg.step < n; ++t) removed.push_back(t * cfg.step);
  std::vector<std::size_t> n_selected;
  for (std::size_t r : removed) n_selected.push_back(n - r);

  std::vector<std::vector<double>> accuracy(cfg.seeds.size(), std::vector<double>(removed.size()));
  for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
    const std::vector<std::size_t> order = selection_order(assessed, scores, cfg.order, cfg.seeds[s]);
    utility::TrainConfig train = cfg.train;
    train.seed = cfg.seeds[s];
    parallel_for(removed.size(), cfg.threads, [&](std::size_t p) {
      std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(removed[p]), order.end());
      accuracy[s][p] = utility::utility_value(assessed, rows, validation, train);
    });
  }
  return CurveSeries{std::string(method_name(scores.method)), CurveMode::remove, cfg.order,
                     aggregate(n_selected, accuracy)};
}

double mid_curve_accuracy(const CurveSeries& series, std::size_t assessed_count) {
  if (series.points.empty()) throw InvalidInput("empty curve");
  const double target = static_cast<double>(assessed_count) / 2.0;
  const CurvePoint* best = &series.points.front();
  for (const auto& p : series.points) {
    if (std::abs(static_cast<double>(p.n_selected) - target) <
        std::abs(static_cast<double>(best->n_selected) - target)) {
      best = &p;
    }
  }
  return best->mean_accuracy;
}

const MethodTiming& TimingReport::at(Method method) const {
  for (const auto& e : entries) {
    if (e.method == method) return e;
  }
  throw InvalidInput("timing report has no entry for " + std::string(method_name(method)));
}

TimingReport benchmark_timing(const LabeledSet& assessed, const LabeledSet& validation,
                              const std::vector<Method>& methods, const BenchConfig& cfg) {
  if (methods.empty()) throw InvalidInput("no methods to benchmark");
  const std::size_t n = assessed.rows();
  valuation::ValuationOptions options{assessed.features().ids(), cfg.threads};
  TimingReport report;
  for (Method method : methods) {
    MethodTiming entry;
    entry.method = method;
    auto start = std::chrono::steady_clock::now();
    switch (method) {
      case Method::examine:
        entry.report = examine_scores(assessed.features(), {cfg.center, cfg.threads});
        break;
      case Method::random:
        entry.report = valuation::random_values(n, cfg.seed, options);
        break;
      case Method::loo:
      case Method::shapley_exact:
      case Method::shapley_tmc: {
        valuation::UtilityFunction v = valuation::logistic_utility(assessed, validation, cfg.train);
        if (method == Method::loo) {
          entry.report = valuation::loo_values(n, v, options);
        } else if (method == Method::shapley_exact) {
          entry.report = valuation::shapley_exact(n, v, options);
        } else {
          entry.report = valuation::shapley_tmc(n, v, cfg.tmc, options);
        }
        entry.utility_evaluations = v.evaluations();
        break;
      }
    }
    entry.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace examine::experiments
