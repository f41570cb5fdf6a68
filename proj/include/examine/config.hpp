#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "examine/experiments.hpp"
#include "examine/score_report.hpp"
#include "examine/synth.hpp"
#include "examine/utility.hpp"
#include "examine/valuation.hpp"

namespace examine {

// Run configuration. Every section and key is optional; unknown keys at
// any level are rejected.
//
// {
//   "seed": 0,
//   "clusters":   {"classes": 2, "dim": 64, "intra_std": 0.5},
//   "corruption": {"levels": [0.1, 0.3, 0.5, 1.0],
//                  "per_level_count": 100,        // or one count per level
//                  "clean_count": 100},
//   "splits":     {"clean_train": 20, "validation": 2000},
//   "train":      {"learning_rate": 0.1, "iterations": 500, "l2": 1e-4},
//   "tmc":        {"max_permutations": 2000, "truncation_tolerance": 0.01,
//                  "convergence_threshold": 0.05, "convergence_window": 100},
//   "curve":      {"step": 5, "seeds": [0, 1, 2, 3, 4], "order": "high_first"},
//   "bench":      {"methods": ["examine", "loo", "shapley_tmc", "random"]},
//   "center": false
// }
struct RunConfig {
  std::uint64_t seed = 0;
  synth::ClusterParams clusters;
  synth::CorruptionSpec corruption;
  synth::BenchmarkSplits splits;
  utility::TrainConfig train;
  valuation::TmcConfig tmc;
  std::size_t curve_step = 5;
  std::vector<std::uint64_t> curve_seeds{0, 1, 2, 3, 4};
  std::optional<experiments::CurveOrder> curve_order;
  std::vector<Method> bench_methods{Method::examine, Method::loo, Method::shapley_tmc, Method::random};
  bool center = false;
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig read_config(const std::filesystem::path& path);

}  // namespace examine
