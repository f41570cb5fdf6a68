#include "examine/utility.hpp"

#include <gtest/gtest.h>

#include <numeric>

#include "examine/errors.hpp"
#include "examine/synth.hpp"
#include "support.hpp"

namespace examine::utility {
namespace {

LabeledSet make_set(const Matrix& x, std::vector<int> labels, int k) {
  return LabeledSet(FeatureMatrix(x), std::move(labels), k);
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

TEST(Train, SinglePointPredictsItsLabel) {
  Matrix x(1, 2);
  x << 0.3, -0.7;
  for (int label : {0, 1, 2}) {
    LabeledSet set = make_set(x, {label}, 3);
    LogisticModel model = train(set, {});
    Eigen::RowVectorXd logits = model.weights.leftCols(2) * x.row(0).transpose();
    logits += model.weights.col(2).transpose();
    Eigen::RowVectorXd p = (logits.array() - logits.maxCoeff()).exp();
    p /= p.sum();
    EXPECT_GT(p(label), 0.5);
    EXPECT_EQ(model.predict(x.row(0)), label);
  }
}

TEST(Train, SeparablePairReachesFullAccuracy) {
  Matrix x(2, 2);
  x << 1, 0, 0, 1;
  LabeledSet set = make_set(x, {0, 1}, 2);
  EXPECT_DOUBLE_EQ(accuracy(train(set, {}), set), 1.0);
}

TEST(Train, GradientMatchesFiniteDifferences) {
  Matrix x = testing::random_matrix(10, 3, 17);
  LabeledSet set = make_set(x, {0, 1, 2, 0, 1, 2, 0, 1, 2, 1}, 3);
  Rng rng(5);
  Matrix w(3, 4);
  for (Eigen::Index r = 0; r < 3; ++r)
    for (Eigen::Index c = 0; c < 4; ++c) w(r, c) = rng.normal(0.0, 0.5);
  const auto rows = all_rows(10);
  const double l2 = 0.05;
  LossEvaluation analytic = evaluate_loss(w, set, rows, l2);
  const double h = 1e-5;
  double worst = 0.0;
  for (Eigen::Index r = 0; r < 3; ++r) {
    for (Eigen::Index c = 0; c < 4; ++c) {
      Matrix plus = w, minus = w;
      plus(r, c) += h;
      minus(r, c) -= h;
      const double fd = (evaluate_loss(plus, set, rows, l2).loss - evaluate_loss(minus, set, rows, l2).loss) / (2 * h);
      const double g = analytic.gradient(r, c);
      worst = std::max(worst, std::abs(fd - g) / std::max(std::abs(fd), 1e-8));
    }
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(Train, LossDoesNotIncrease) {
  Matrix x = testing::random_matrix(30, 4, 1);
  std::vector<int> labels(30);
  for (int i = 0; i < 30; ++i) labels[i] = x(i, 0) > 0 ? 1 : 0;
  LabeledSet set = make_set(x, labels, 2);
  const auto rows = all_rows(30);
  double previous = evaluate_loss(Matrix::Zero(2, 5), set, rows, 1e-4).loss;
  for (int iters : {1, 5, 20, 100, 500}) {
    TrainConfig cfg;
    cfg.iterations = iters;
    const double loss = evaluate_loss(train(set, cfg).weights, set, rows, cfg.l2).loss;
    EXPECT_LE(loss, previous + 1e-12);
    previous = loss;
  }
}

TEST(Train, BiasIsNotRegularized) {
  Matrix x = Matrix::Zero(2, 1);
  LabeledSet set = make_set(x, {0, 0}, 2);
  Matrix w = Matrix::Zero(2, 2);
  w(0, 1) = 3.0;
  const auto rows = all_rows(2);
  EXPECT_DOUBLE_EQ(evaluate_loss(w, set, rows, 10.0).loss, evaluate_loss(w, set, rows, 0.0).loss);
}

TEST(Train, RejectsBadConfig) {
  Matrix x = Matrix::Identity(2, 2);
  LabeledSet set = make_set(x, {0, 1}, 2);
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  EXPECT_THROW(train(set, cfg), InvalidInput);
  cfg = {};
  cfg.iterations = -1;
  EXPECT_THROW(train(set, cfg), InvalidInput);
}

TEST(Accuracy, ConstantClassZeroModel) {
  LogisticModel model;
  model.weights = Matrix::Zero(2, 3);
  model.weights(0, 2) = 1.0;
  Matrix x = testing::random_matrix(6, 2, 3);
  EXPECT_DOUBLE_EQ(accuracy(model, make_set(x, {0, 0, 0, 0, 0, 0}, 2)), 1.0);
  EXPECT_DOUBLE_EQ(accuracy(model, make_set(x, {1, 1, 1, 1, 1, 1}, 2)), 0.0);
}

TEST(Accuracy, TiesGoToLowestClass) {
  LogisticModel model;
  model.weights = Matrix::Zero(3, 3);
  Matrix x = testing::random_matrix(5, 2, 4);
  EXPECT_DOUBLE_EQ(accuracy(model, make_set(x, {0, 1, 2, 0, 1}, 3)), 0.4);
}

TEST(UtilityValue, EmptySubsetIsChance) {
  Matrix x = Matrix::Identity(2, 2);
  LabeledSet set = make_set(x, {0, 1}, 2);
  EXPECT_DOUBLE_EQ(utility_value(set, std::span<const std::size_t>{}, set, {}), 0.5);
  LabeledSet four = make_set(Matrix::Identity(4, 4), {0, 1, 2, 3}, 4);
  EXPECT_DOUBLE_EQ(utility_value(four, std::span<const std::size_t>{}, four, {}), 0.25);
}

TEST(UtilityValue, SeparableToyIsPerfect) {
  LabeledSet train_set = synth::gen_clusters(10, 2, 4, 0.01, 1);
  LabeledSet test_set = synth::gen_clusters(25, 2, 4, 0.01, 2);
  EXPECT_DOUBLE_EQ(utility_value(train_set, test_set, {}), 1.0);
}

TEST(UtilityValue, InvariantToRowOrder) {
  LabeledSet pool = synth::gen_clusters(8, 3, 5, 0.8, 3);
  LabeledSet test_set = synth::gen_clusters(20, 3, 5, 0.8, 4);
  std::vector<std::size_t> rows{3, 7, 1, 12, 20, 9, 15};
  std::vector<std::size_t> shuffled{20, 1, 15, 7, 12, 3, 9};
  EXPECT_EQ(utility_value(pool, rows, test_set, {}), utility_value(pool, shuffled, test_set, {}));
  EXPECT_EQ(train(pool, rows, {}).weights, train(pool.select_rows(shuffled), {}).weights);
}

TEST(UtilityValue, DimensionMismatchRejected) {
  LabeledSet a = synth::gen_clusters(2, 2, 3, 0.1, 1);
  LabeledSet b = synth::gen_clusters(2, 2, 4, 0.1, 1);
  EXPECT_THROW(utility_value(a, b, {}), InvalidInput);
}

TEST(TrainConfig, DigestIsStable) {
  TrainConfig a, b;
  EXPECT_EQ(a.digest(), b.digest());
  b.l2 = 0.5;
  EXPECT_NE(a.digest(), b.digest());
}

}  // namespace
}  // namespace examine::utility
