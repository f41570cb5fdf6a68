#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "examine/feature_matrix.hpp"

namespace examine::synth {

struct ClusterParams {
  int classes = 2;
  std::size_t dim = 64;
  double intra_std = 0.5;

  void validate() const;
};

// n_per_class * k points; point j has label j % k. Class means are the
// first k standard basis vectors of R^dim, so they are orthonormal and
// shared across every split generated with the same (k, dim).
LabeledSet gen_clusters(std::size_t n_per_class, int k, std::size_t dim, double intra_std, std::uint64_t seed);

// Adds N(delta, delta * |m|) noise to every entry of the selected rows,
// with m the scalar mean over all entries of `features`.
FeatureMatrix corrupt_gaussian(const FeatureMatrix& features, std::span<const std::size_t> indices,
                               double delta, std::uint64_t seed);

// Scalar mean over all entries.
double entry_mean(const FeatureMatrix& features);

struct CorruptionSpec {
  std::vector<double> levels{0.1, 0.3, 0.5, 1.0};
  std::vector<std::size_t> per_level_count{100, 100, 100, 100};
  std::size_t clean_count = 100;

  std::size_t total() const;
  void validate() const;
};

struct AssessedSet {
  LabeledSet data;
  // Ground-truth delta per row (0 for clean rows).
  std::vector<double> corruption_level;
  double noise_reference_mean = 0.0;
};

// Generates clusters, assigns corruption levels in contiguous blocks along
// the class-interleaved row order (so every level is class-balanced to
// within one item), then corrupts each level from the clean matrix.
AssessedSet make_assessed_set(const CorruptionSpec& spec, const ClusterParams& clusters, std::uint64_t seed);

struct BenchmarkSplits {
  std::size_t clean_train = 20;
  std::size_t validation = 2000;
};

struct Benchmark {
  LabeledSet clean_train;
  AssessedSet assessed;
  LabeledSet validation;
};

// Clean train, assessed and validation sets from one cluster geometry with
// disjoint id prefixes ("train-", "item-", "val-").
Benchmark make_benchmark(const CorruptionSpec& spec, const ClusterParams& clusters, const BenchmarkSplits& splits,
                         std::uint64_t seed);

}  // namespace examine::synth
