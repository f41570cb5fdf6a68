#include "examine/valuation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "examine/errors.hpp"
#include "examine/parallel.hpp"
#include "examine/rng.hpp"

namespace examine::valuation {
namespace {

std::vector<std::string> resolve_ids(std::size_t n, const ValuationOptions& options) {
  if (options.ids.empty()) return default_ids(n);
  if (options.ids.size() != n) throw InvalidInput("id list length does not match item count");
  return options.ids;
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

std::size_t UtilityFunction::KeyHash::operator()(const std::vector<std::uint64_t>& key) const {
  std::uint64_t h = 0x84222325CBF29CE4ULL;
  for (std::uint64_t w : key) h = mix_seed(h ^ w, 0);
  return static_cast<std::size_t>(h);
}

UtilityFunction::UtilityFunction(std::size_t n, Fn fn, bool memoize)
    : n_(n), fn_(std::move(fn)), memoize_(memoize) {}

double UtilityFunction::operator()(std::span<const std::size_t> subset) const {
  std::vector<std::uint64_t> key((n_ + 63) / 64, 0);
  std::size_t count = 0;
  for (std::size_t i : subset) {
    if (i >= n_) throw InvalidInput("utility subset index " + std::to_string(i) + " out of range");
    std::uint64_t bit = 1ULL << (i % 64);
    if (!(key[i / 64] & bit)) ++count;
    key[i / 64] |= bit;
  }
  if (memoize_) {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      cache_hits_.fetch_add(1);
      return it->second;
    }
  }
  std::vector<std::size_t> canonical;
  canonical.reserve(count);
  for (std::size_t i = 0; i < n_; ++i) {
    if (key[i / 64] & (1ULL << (i % 64))) canonical.push_back(i);
  }
  double value = fn_(canonical);
  evaluations_.fetch_add(1);
  if (memoize_) {
    std::lock_guard lock(mutex_);
    cache_.emplace(std::move(key), value);
  }
  return value;
}

UtilityFunction logistic_utility(LabeledSet train, LabeledSet test, utility::TrainConfig cfg, bool memoize) {
  cfg.validate();
  if (train.cols() != test.cols()) throw InvalidInput("train and test dimensions differ");
  auto train_ptr = std::make_shared<const LabeledSet>(std::move(train));
  auto test_ptr = std::make_shared<const LabeledSet>(std::move(test));
  const std::size_t n = train_ptr->rows();
  return UtilityFunction(
      n,
      [train_ptr, test_ptr, cfg](std::span<const std::size_t> rows) {
        return utility::utility_value(*train_ptr, rows, *test_ptr, cfg);
      },
      memoize);
}

void TmcConfig::validate() const {
  if (max_permutations < 1) throw InvalidInput("max_permutations must be positive");
  if (!(truncation_tolerance >= 0.0)) throw InvalidInput("truncation_tolerance must be nonnegative");
  if (!(convergence_threshold >= 0.0)) throw InvalidInput("convergence_threshold must be nonnegative");
  if (convergence_window < 1) throw InvalidInput("convergence_window must be positive");
  if (convergence_window > max_permutations) {
    throw InvalidInput("convergence_window exceeds max_permutations");
  }
}

ScoreReport loo_values(std::size_t n, const UtilityFunction& v, const ValuationOptions& options) {
  if (n < 1) throw InvalidInput("leave-one-out needs at least one item");
  if (v.size() != n) throw InvalidInput("utility size does not match item count");
  auto ids = resolve_ids(n, options);
  const std::size_t before = v.evaluations();
  const std::vector<std::size_t> everything = all_indices(n);
  const double full = v(everything);
  std::vector<double> scores(n);
  parallel_for(n, options.threads, [&](std::size_t i) {
    std::vector<std::size_t> rest;
    rest.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) rest.push_back(j);
    }
    scores[i] = full - v(rest);
  });
  std::map<std::string, std::string> params{
      {"utility_value_full", format_double(full)},
      {"utility_evaluations", std::to_string(v.evaluations() - before)},
  };
  return make_report(Method::loo, std::move(ids), std::move(scores), std::move(params));
}

ScoreReport shapley_exact(std::size_t n, const UtilityFunction& v, const ValuationOptions& options) {
  if (n > kMaxExactShapleyPlayers) {
    throw SizeLimitError("exact Shapley enumeration is limited to N <= " +
                         std::to_string(kMaxExactShapleyPlayers) + " items (got N = " + std::to_string(n) + ")");
  }
  if (n < 1) throw InvalidInput("exact Shapley needs at least one item");
  if (v.size() != n) throw InvalidInput("utility size does not match item count");
  auto ids = resolve_ids(n, options);
  const std::size_t before = v.evaluations();

  const std::size_t subsets = std::size_t{1} << n;
  std::vector<double> table(subsets);
  parallel_for(subsets, options.threads, [&](std::size_t mask) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) members.push_back(i);
    }
    table[mask] = v(members);
  });

  // weight[s] = s! (n - 1 - s)! / n!
  std::vector<double> weight(n);
  for (std::size_t s = 0; s < n; ++s) {
    double w = 1.0 / static_cast<double>(n);
    for (std::size_t j = 1; j <= s; ++j) {
      w *= static_cast<double>(j) / static_cast<double>(n - 1 - s + j);
    }
    weight[s] = w;
  }

  std::vector<double> scores(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    double sum = 0.0;
    for (std::size_t mask = 0; mask < subsets; ++mask) {
      if (mask & bit) continue;
      sum += weight[static_cast<std::size_t>(std::popcount(mask))] * (table[mask | bit] - table[mask]);
    }
    scores[i] = sum;
  }
  std::map<std::string, std::string> params{
      {"utility_value_full", format_double(table[subsets - 1])},
      {"utility_value_empty", format_double(table[0])},
      {"utility_evaluations", std::to_string(v.evaluations() - before)},
  };
  return make_report(Method::shapley_exact, std::move(ids), std::move(scores), std::move(params));
}

ScoreReport shapley_tmc(std::size_t n, const UtilityFunction& v, const TmcConfig& cfg,
                        const ValuationOptions& options) {
  cfg.validate();
  if (n < 1) throw InvalidInput("TMC Shapley needs at least one item");
  if (v.size() != n) throw InvalidInput("utility size does not match item count");
  auto ids = resolve_ids(n, options);
  const std::size_t before = v.evaluations();

  const double full = v(all_indices(n));
  const double empty = v(std::span<const std::size_t>{});
  Rng rng(cfg.seed);

  std::vector<double> estimate(n, 0.0);
  std::vector<std::vector<double>> history(cfg.convergence_window, std::vector<double>(n, 0.0));
  std::vector<std::size_t> prefix;
  prefix.reserve(n);
  std::size_t permutations = 0;
  std::size_t truncated_walks = 0;
  bool converged = false;
  double last_change = std::numeric_limits<double>::infinity();

  for (std::size_t t = 1; t <= cfg.max_permutations; ++t) {
    const std::vector<std::size_t> perm = rng.permutation(n);
    prefix.clear();
    double previous = empty;
    bool truncated = false;
    const double inv_t = 1.0 / static_cast<double>(t);
    for (std::size_t item : perm) {
      double marginal = 0.0;
      if (!truncated && std::abs(previous - full) < cfg.truncation_tolerance) truncated = true;
      if (!truncated) {
        prefix.push_back(item);
        const double current = v(prefix);
        marginal = current - previous;
        previous = current;
      }
      estimate[item] += (marginal - estimate[item]) * inv_t;
    }
    if (truncated) ++truncated_walks;
    permutations = t;

    std::vector<double>& slot = history[t % cfg.convergence_window];
    if (t > cfg.convergence_window) {
      double change = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        change += std::abs(estimate[i] - slot[i]) / (std::abs(estimate[i]) + 1e-12);
      }
      last_change = change / static_cast<double>(n);
      if (last_change < cfg.convergence_threshold) {
        converged = true;
        break;
      }
    }
    slot = estimate;
  }

  std::map<std::string, std::string> params{
      {"max_permutations", std::to_string(cfg.max_permutations)},
      {"truncation_tolerance", format_double(cfg.truncation_tolerance)},
      {"convergence_threshold", format_double(cfg.convergence_threshold)},
      {"convergence_window", std::to_string(cfg.convergence_window)},
      {"permutations_used", std::to_string(permutations)},
      {"converged", converged ? "true" : "false"},
      {"truncated_walks", std::to_string(truncated_walks)},
      {"utility_value_full", format_double(full)},
      {"utility_evaluations", std::to_string(v.evaluations() - before)},
  };
  if (std::isfinite(last_change)) params["final_mean_relative_change"] = format_double(last_change);
  return make_report(Method::shapley_tmc, std::move(ids), std::move(estimate), std::move(params), cfg.seed);
}

ScoreReport random_values(std::size_t n, std::uint64_t seed, const ValuationOptions& options) {
  if (n < 1) throw InvalidInput("random valuation needs at least one item");
  auto ids = resolve_ids(n, options);
  Rng rng(seed);
  std::vector<double> scores(n);
  for (double& s : scores) s = rng.uniform();
  return make_report(Method::random, std::move(ids), std::move(scores), {}, seed);
}

}  // namespace examine::valuation
