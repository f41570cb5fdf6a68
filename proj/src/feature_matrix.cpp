#include "examine/feature_matrix.hpp"

#include <cmath>
#include <string>
#include <unordered_set>

#include "examine/errors.hpp"

namespace examine {

std::vector<std::string> default_ids(std::size_t n) {
  std::size_t width = 1;
  for (std::size_t v = n > 0 ? n - 1 : 0; v >= 10; v /= 10) ++width;
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string digits = std::to_string(i);
    ids.push_back(std::string(width - digits.size(), '0') + digits);
  }
  return ids;
}

// Delegates with a copy: argument evaluation order would otherwise let the move run before rows() is read.
FeatureMatrix::FeatureMatrix(const Matrix& data)
    : FeatureMatrix(default_ids(static_cast<std::size_t>(data.rows())), data) {}

FeatureMatrix::FeatureMatrix(std::vector<std::string> ids, Matrix data)
    : ids_(std::move(ids)), data_(std::move(data)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw InvalidInput("feature matrix must have at least one row and one column");
  }
  if (ids_.size() != rows()) {
    throw InvalidInput("feature matrix has " + std::to_string(rows()) + " rows but " +
                       std::to_string(ids_.size()) + " ids");
  }
  for (Eigen::Index r = 0; r < data_.rows(); ++r) {
    for (Eigen::Index c = 0; c < data_.cols(); ++c) {
      if (!std::isfinite(data_(r, c))) {
        throw InvalidInput("non-finite value at row " + std::to_string(r) + " (id '" +
                           ids_[static_cast<std::size_t>(r)] + "'), column " + std::to_string(c));
      }
    }
  }
  std::unordered_set<std::string> seen;
  seen.reserve(ids_.size());
  for (const auto& id : ids_) {
    if (!seen.insert(id).second) throw InvalidInput("duplicate item id '" + id + "'");
  }
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  Matrix out(static_cast<Eigen::Index>(rows.size()), data_.cols());
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= this->rows()) throw InvalidInput("row index out of range");
    out.row(static_cast<Eigen::Index>(r)) = data_.row(static_cast<Eigen::Index>(rows[r]));
    ids.push_back(ids_[rows[r]]);
  }
  return FeatureMatrix(std::move(ids), std::move(out));
}

std::size_t FeatureMatrix::find(const std::string& id) const {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i] == id) return i;
  }
  return ids_.size();
}

LabeledSet::LabeledSet(FeatureMatrix features, std::vector<int> labels, int num_classes)
    : features_(std::move(features)), labels_(std::move(labels)), num_classes_(num_classes) {
  if (num_classes_ < 2) throw InvalidInput("labeled set needs at least two classes");
  if (labels_.size() != features_.rows()) {
    throw InvalidInput("label count " + std::to_string(labels_.size()) +
                       " does not match row count " + std::to_string(features_.rows()));
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0 || labels_[i] >= num_classes_) {
      throw InvalidInput("label " + std::to_string(labels_[i]) + " at row " + std::to_string(i) +
                         " outside [0, " + std::to_string(num_classes_) + ")");
    }
  }
}

LabeledSet LabeledSet::select_rows(std::span<const std::size_t> rows) const {
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= this->rows()) throw InvalidInput("row index out of range");
    labels.push_back(labels_[r]);
  }
  return LabeledSet(features_.select_rows(rows), std::move(labels), num_classes_);
}

LabeledSet concat(const LabeledSet& first, const LabeledSet& second) {
  if (first.cols() != second.cols()) {
    throw InvalidInput("cannot concatenate sets of dimension " + std::to_string(first.cols()) +
                       " and " + std::to_string(second.cols()));
  }
  if (first.num_classes() != second.num_classes()) {
    throw InvalidInput("cannot concatenate sets with different class counts");
  }
  Matrix data(first.features().data().rows() + second.features().data().rows(),
              first.features().data().cols());
  data << first.features().data(), second.features().data();
  std::vector<std::string> ids = first.features().ids();
  ids.insert(ids.end(), second.features().ids().begin(), second.features().ids().end());
  std::vector<int> labels = first.labels();
  labels.insert(labels.end(), second.labels().begin(), second.labels().end());
  return LabeledSet(FeatureMatrix(std::move(ids), std::move(data)), std::move(labels),
                    first.num_classes());
}

}  // namespace examine
