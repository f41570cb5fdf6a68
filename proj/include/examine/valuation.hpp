#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "examine/feature_matrix.hpp"
#include "examine/score_report.hpp"
#include "examine/utility.hpp"

namespace examine::valuation {

// Set function over training indices 0..n-1. Subsets are canonicalized
// (sorted, deduplicated) before evaluation and optionally memoized by
// content. evaluations() counts calls that reached the wrapped function.
class UtilityFunction {
 public:
  using Fn = std::function<double(std::span<const std::size_t>)>;

  UtilityFunction(std::size_t n, Fn fn, bool memoize = true);

  std::size_t size() const { return n_; }
  double operator()(std::span<const std::size_t> subset) const;
  std::size_t evaluations() const { return evaluations_.load(); }
  std::size_t cache_hits() const { return cache_hits_.load(); }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::uint64_t>& key) const;
  };

  std::size_t n_;
  Fn fn_;
  bool memoize_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::vector<std::uint64_t>, double, KeyHash> cache_;
  mutable std::atomic<std::size_t> evaluations_{0};
  mutable std::atomic<std::size_t> cache_hits_{0};
};

// Validation accuracy of a logistic model trained on the chosen rows of
// `train`. Both sets are copied into shared ownership.
UtilityFunction logistic_utility(LabeledSet train, LabeledSet test, utility::TrainConfig cfg,
                                 bool memoize = true);

struct TmcConfig {
  std::size_t max_permutations = 2000;
  double truncation_tolerance = 0.01;
  double convergence_threshold = 0.05;
  std::size_t convergence_window = 100;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ValuationOptions {
  // Item ids for the report; defaults to zero-padded indices.
  std::vector<std::string> ids;
  unsigned threads = 1;
};

constexpr std::size_t kMaxExactShapleyPlayers = 20;

// phi_i = V(all) - V(all \ {i}); exactly n + 1 evaluations.
ScoreReport loo_values(std::size_t n, const UtilityFunction& v, const ValuationOptions& options = {});

// Exact Shapley values by enumerating all 2^n subsets.
ScoreReport shapley_exact(std::size_t n, const UtilityFunction& v, const ValuationOptions& options = {});

// Truncated Monte Carlo permutation sampling.
ScoreReport shapley_tmc(std::size_t n, const UtilityFunction& v, const TmcConfig& cfg,
                        const ValuationOptions& options = {});

// i.i.d. uniform(0, 1) scores.
ScoreReport random_values(std::size_t n, std::uint64_t seed, const ValuationOptions& options = {});

}  // namespace examine::valuation
