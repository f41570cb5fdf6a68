#include "examine/utility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <vector>

#include "examine/errors.hpp"
#include "examine/score_report.hpp"

namespace examine::utility {
namespace {

struct Batch {
  Matrix x;  // n x (C + 1), last column ones
  std::vector<int> y;
};

Batch gather(const LabeledSet& data, std::span<const std::size_t> rows) {
  const Matrix& x = data.features().data();
  for (std::size_t r : rows) {
    if (r >= data.rows()) throw InvalidInput("training row index out of range");
  }
  // Canonical order by (label, feature values): the floating-point sums, and
  // so the model, depend only on the multiset of examples.
  std::vector<std::size_t> sorted(rows.begin(), rows.end());
  std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
    if (data.labels()[a] != data.labels()[b]) return data.labels()[a] < data.labels()[b];
    const auto ra = x.row(static_cast<Eigen::Index>(a));
    const auto rb = x.row(static_cast<Eigen::Index>(b));
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  const auto c = static_cast<Eigen::Index>(data.cols());
  Batch batch;
  batch.x.resize(static_cast<Eigen::Index>(sorted.size()), c + 1);
  batch.y.reserve(sorted.size());
  for (std::size_t r = 0; r < sorted.size(); ++r) {
    batch.x.row(static_cast<Eigen::Index>(r)).head(c) =
        x.row(static_cast<Eigen::Index>(sorted[r]));
    batch.x(static_cast<Eigen::Index>(r), c) = 1.0;
    batch.y.push_back(data.labels()[sorted[r]]);
  }
  return batch;
}

// Row-wise softmax of logits in place; returns the summed log-loss.
double softmax_rows(Matrix& logits, const std::vector<int>& y) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    auto row = logits.row(i);
    const double shift = row.maxCoeff();
    row.array() -= shift;
    const double log_norm = std::log(row.array().exp().sum());
    loss -= row(y[static_cast<std::size_t>(i)]) - log_norm;
    row = (row.array() - log_norm).exp().matrix();
  }
  return loss;
}

// Gradient of the regularized loss; probabilities overwrite `scratch`.
void gradient(const Matrix& weights, const Batch& batch, double l2, Matrix& scratch, Matrix& grad,
              double* loss) {
  const auto n = batch.x.rows();
  const auto c = weights.cols() - 1;
  scratch.noalias() = batch.x * weights.transpose();
  double data_loss = softmax_rows(scratch, batch.y);
  for (Eigen::Index i = 0; i < n; ++i) scratch(i, batch.y[static_cast<std::size_t>(i)]) -= 1.0;
  grad.noalias() = scratch.transpose() * batch.x;
  grad /= static_cast<double>(n);
  grad.leftCols(c) += l2 * weights.leftCols(c);
  if (loss != nullptr) {
    *loss = data_loss / static_cast<double>(n) + 0.5 * l2 * weights.leftCols(c).squaredNorm();
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidInput("learning_rate must be positive");
  }
  if (iterations < 1) throw InvalidInput("iterations must be positive");
  if (!(l2 >= 0.0) || !std::isfinite(l2)) throw InvalidInput("l2 must be nonnegative");
}

std::string TrainConfig::digest() const {
  return "logreg:lr=" + format_double(learning_rate) + ",it=" + std::to_string(iterations) +
         ",l2=" + format_double(l2) + ",seed=" + std::to_string(seed);
}

int LogisticModel::predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  const auto c = weights.cols() - 1;
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < weights.rows(); ++k) {
    double s = weights.row(k).head(c).dot(x) + weights(k, c);
    if (s > best_score) {
      best_score = s;
      best = static_cast<int>(k);
    }
  }
  return best;
}

LossEvaluation evaluate_loss(const Matrix& weights, const LabeledSet& data,
                             std::span<const std::size_t> rows, double l2) {
  if (rows.empty()) throw InvalidInput("loss over an empty set");
  Batch batch = gather(data, rows);
  Matrix scratch;
  LossEvaluation out;
  out.gradient.resize(weights.rows(), weights.cols());
  gradient(weights, batch, l2, scratch, out.gradient, &out.loss);
  return out;
}

LogisticModel train(const LabeledSet& data, std::span<const std::size_t> rows, const TrainConfig& cfg) {
  cfg.validate();
  if (rows.empty()) throw InvalidInput("cannot train on an empty set");
  Batch batch = gather(data, rows);
  const auto k = static_cast<Eigen::Index>(data.num_classes());
  LogisticModel model;
  model.weights = Matrix::Zero(k, static_cast<Eigen::Index>(data.cols()) + 1);
  model.train_config_digest = cfg.digest();
  Matrix scratch(batch.x.rows(), k);
  Matrix grad(k, model.weights.cols());
  for (int it = 0; it < cfg.iterations; ++it) {
    gradient(model.weights, batch, cfg.l2, scratch, grad, nullptr);
    model.weights -= cfg.learning_rate * grad;
  }
  return model;
}

LogisticModel train(const LabeledSet& data, const TrainConfig& cfg) {
  std::vector<std::size_t> rows(data.rows());
  std::iota(rows.begin(), rows.end(), 0);
  return train(data, rows, cfg);
}

double accuracy(const LogisticModel& model, const LabeledSet& test) {
  if (static_cast<Eigen::Index>(test.cols()) + 1 != model.weights.cols()) {
    throw InvalidInput("test dimension " + std::to_string(test.cols()) + " does not match model dimension " +
                       std::to_string(model.weights.cols() - 1));
  }
  std::size_t correct = 0;
  const Matrix& x = test.features().data();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (model.predict(x.row(i)) == test.labels()[static_cast<std::size_t>(i)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.rows());
}

double utility_value(const LabeledSet& pool, std::span<const std::size_t> rows, const LabeledSet& test,
                     const TrainConfig& cfg) {
  if (pool.cols() != test.cols()) throw InvalidInput("train and test dimensions differ");
  if (rows.empty()) return 1.0 / static_cast<double>(pool.num_classes());
  return accuracy(train(pool, rows, cfg), test);
}

double utility_value(const LabeledSet& train_subset, const LabeledSet& test, const TrainConfig& cfg) {
  std::vector<std::size_t> rows(train_subset.rows());
  std::iota(rows.begin(), rows.end(), 0);
  return utility_value(train_subset, rows, test, cfg);
}

}  // namespace examine::utility
