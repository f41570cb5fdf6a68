#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace examine {

// Row-major so that per-item rows are contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Zero-padded ids ("000", "001", ...) whose lexical order matches row order.
std::vector<std::string> default_ids(std::size_t n);

// N x C embedding matrix with one unique id per row. Construction validates
// shape, finiteness and id uniqueness; instances are always valid.
class FeatureMatrix {
 public:
  explicit FeatureMatrix(const Matrix& data);
  FeatureMatrix(std::vector<std::string> ids, Matrix data);

  const std::vector<std::string>& ids() const { return ids_; }
  const Matrix& data() const { return data_; }
  std::size_t rows() const { return static_cast<std::size_t>(data_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(data_.cols()); }

  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;
  // Index of `id`, or rows() when absent.
  std::size_t find(const std::string& id) const;

 private:
  std::vector<std::string> ids_;
  Matrix data_;
};

// Feature matrix plus class labels in [0, num_classes).
class LabeledSet {
 public:
  LabeledSet(FeatureMatrix features, std::vector<int> labels, int num_classes);

  const FeatureMatrix& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }
  int num_classes() const { return num_classes_; }
  std::size_t rows() const { return features_.rows(); }
  std::size_t cols() const { return features_.cols(); }

  LabeledSet select_rows(std::span<const std::size_t> rows) const;

 private:
  FeatureMatrix features_;
  std::vector<int> labels_;
  int num_classes_;
};

// Rows of `first` followed by rows of `second`. Ids must stay unique.
LabeledSet concat(const LabeledSet& first, const LabeledSet& second);

}  // namespace examine
