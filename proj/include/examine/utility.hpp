#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "examine/feature_matrix.hpp"

namespace examine::utility {

struct TrainConfig {
  double learning_rate = 0.1;
  int iterations = 500;
  double l2 = 1e-4;
  std::uint64_t seed = 0;

  void validate() const;
  // Stable identifier of the hyperparameters, e.g. for report metadata.
  std::string digest() const;
};

// Multinomial logistic regression. weights is K x (C + 1); the last column
// is the bias.
struct LogisticModel {
  Matrix weights;
  std::string train_config_digest;

  int predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
};

struct LossEvaluation {
  double loss = 0.0;
  Matrix gradient;
};

// Mean cross-entropy plus (l2 / 2) * ||W[:, :C]||^2 over the given rows,
// with its analytic gradient. The bias column is not regularized.
LossEvaluation evaluate_loss(const Matrix& weights, const LabeledSet& data,
                             std::span<const std::size_t> rows, double l2);

// Full-batch gradient descent from zero weights for cfg.iterations steps.
// Rows are consumed in a canonical (label, features) order, so the result
// depends only on the multiset of examples, bit for bit.
LogisticModel train(const LabeledSet& data, std::span<const std::size_t> rows, const TrainConfig& cfg);
LogisticModel train(const LabeledSet& data, const TrainConfig& cfg);

// Fraction of argmax-correct predictions; ties go to the lowest class.
double accuracy(const LogisticModel& model, const LabeledSet& test);

// Accuracy on `test` of a model trained on `rows` of `pool`; 1/K for the
// empty subset.
double utility_value(const LabeledSet& pool, std::span<const std::size_t> rows, const LabeledSet& test,
                     const TrainConfig& cfg);
double utility_value(const LabeledSet& train_subset, const LabeledSet& test, const TrainConfig& cfg);

}  // namespace examine::utility
