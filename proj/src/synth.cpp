#include "examine/synth.hpp"

#include <cmath>
#include <string>

#include "examine/errors.hpp"
#include "examine/rng.hpp"

namespace examine::synth {
namespace {

LabeledSet take_rows(const LabeledSet& full, std::size_t n, const std::string& prefix) {
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  LabeledSet head = full.select_rows(rows);
  std::vector<std::string> ids;
  ids.reserve(n);
  for (const auto& id : default_ids(n)) ids.push_back(prefix + id);
  return LabeledSet(FeatureMatrix(std::move(ids), head.features().data()), head.labels(), head.num_classes());
}

LabeledSet labeled_clusters(std::size_t n, const ClusterParams& clusters, std::uint64_t seed,
                            const std::string& prefix) {
  const auto k = static_cast<std::size_t>(clusters.classes);
  std::size_t per_class = (n + k - 1) / k;
  LabeledSet full = gen_clusters(per_class, clusters.classes, clusters.dim, clusters.intra_std, seed);
  return take_rows(full, n, prefix);
}

}  // namespace

void ClusterParams::validate() const {
  if (classes < 2) throw InvalidInput("at least two classes are required");
  if (dim < static_cast<std::size_t>(classes)) {
    throw InvalidInput("dimension " + std::to_string(dim) + " is smaller than class count " +
                       std::to_string(classes));
  }
  if (!(intra_std >= 0.0) || !std::isfinite(intra_std)) throw InvalidInput("intra_std must be nonnegative");
}

LabeledSet gen_clusters(std::size_t n_per_class, int k, std::size_t dim, double intra_std, std::uint64_t seed) {
  ClusterParams{k, dim, intra_std}.validate();
  if (n_per_class < 1) throw InvalidInput("n_per_class must be positive");
  const std::size_t n = n_per_class * static_cast<std::size_t>(k);
  Rng rng(seed);
  Matrix data = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  std::vector<int> labels(n);
  for (std::size_t j = 0; j < n; ++j) {
    const int label = static_cast<int>(j % static_cast<std::size_t>(k));
    labels[j] = label;
    const auto row = static_cast<Eigen::Index>(j);
    if (intra_std > 0.0) {
      for (Eigen::Index c = 0; c < data.cols(); ++c) data(row, c) = rng.normal(0.0, intra_std);
    }
    data(row, label) += 1.0;
  }
  return LabeledSet(FeatureMatrix(std::move(data)), std::move(labels), k);
}

double entry_mean(const FeatureMatrix& features) { return features.data().mean(); }

FeatureMatrix corrupt_gaussian(const FeatureMatrix& features, std::span<const std::size_t> indices,
                               double delta, std::uint64_t seed) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw InvalidInput("noise level must be nonnegative");
  for (std::size_t i : indices) {
    if (i >= features.rows()) {
      throw InvalidInput("corruption index " + std::to_string(i) + " out of range for " +
                         std::to_string(features.rows()) + " rows");
    }
  }
  Matrix data = features.data();
  if (delta == 0.0) return FeatureMatrix(features.ids(), std::move(data));
  const double stddev = delta * std::abs(entry_mean(features));
  Rng rng(seed);
  for (std::size_t i : indices) {
    auto row = data.row(static_cast<Eigen::Index>(i));
    for (Eigen::Index c = 0; c < row.size(); ++c) {
      row(c) += stddev > 0.0 ? rng.normal(delta, stddev) : delta;
    }
  }
  return FeatureMatrix(features.ids(), std::move(data));
}

std::size_t CorruptionSpec::total() const {
  std::size_t sum = clean_count;
  for (std::size_t c : per_level_count) sum += c;
  return sum;
}

void CorruptionSpec::validate() const {
  if (levels.size() != per_level_count.size()) {
    throw InvalidInput("corruption spec has " + std::to_string(levels.size()) + " levels but " +
                       std::to_string(per_level_count.size()) + " counts");
  }
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] >= 0.0) || !std::isfinite(levels[i])) {
      throw InvalidInput("corruption levels must be finite and nonnegative");
    }
    if (i > 0 && !(levels[i] > levels[i - 1])) {
      throw InvalidInput("corruption levels must be strictly increasing");
    }
  }
  if (total() < 2) throw InvalidInput("assessed set needs at least two items");
}

AssessedSet make_assessed_set(const CorruptionSpec& spec, const ClusterParams& clusters, std::uint64_t seed) {
  spec.validate();
  clusters.validate();
  const std::size_t n = spec.total();
  LabeledSet clean = labeled_clusters(n, clusters, mix_seed(seed, 1), "item-");

  std::vector<double> level(n, 0.0);
  std::vector<std::vector<std::size_t>> members(spec.levels.size());
  std::size_t cursor = spec.clean_count;
  for (std::size_t l = 0; l < spec.levels.size(); ++l) {
    for (std::size_t c = 0; c < spec.per_level_count[l]; ++c, ++cursor) {
      level[cursor] = spec.levels[l];
      members[l].push_back(cursor);
    }
  }

  const FeatureMatrix& base = clean.features();
  Matrix data = base.data();
  for (std::size_t l = 0; l < spec.levels.size(); ++l) {
    FeatureMatrix noisy = corrupt_gaussian(base, members[l], spec.levels[l], mix_seed(seed, 100 + l));
    for (std::size_t i : members[l]) {
      data.row(static_cast<Eigen::Index>(i)) = noisy.data().row(static_cast<Eigen::Index>(i));
    }
  }
  AssessedSet out{LabeledSet(FeatureMatrix(base.ids(), std::move(data)), clean.labels(), clean.num_classes()),
                  std::move(level), entry_mean(base)};
  return out;
}

Benchmark make_benchmark(const CorruptionSpec& spec, const ClusterParams& clusters, const BenchmarkSplits& splits,
                         std::uint64_t seed) {
  if (splits.clean_train < 1 || splits.validation < 1) throw InvalidInput("split sizes must be positive");
  return Benchmark{labeled_clusters(splits.clean_train, clusters, mix_seed(seed, 2), "train-"),
                   make_assessed_set(spec, clusters, seed),
                   labeled_clusters(splits.validation, clusters, mix_seed(seed, 3), "val-")};
}

}  // namespace examine::synth
