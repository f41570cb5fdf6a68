#pragma once

// Shared fixtures and independent reference computations for the tests.

#include <Eigen/SVD>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "examine/feature_matrix.hpp"
#include "examine/rng.hpp"

namespace examine::testing {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.normal(0.0, 1.0);
  return m;
}

// Top singular value by a full two-sided Jacobi SVD, independent of the
// Gram-matrix code under test.
inline double svd_top(const Matrix& m) {
  const Eigen::MatrixXd dense = m;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense);
  return svd.singularValues()(0);
}

inline Matrix without_row(const Matrix& m, Eigen::Index skip) {
  Matrix out(m.rows() - 1, m.cols());
  for (Eigen::Index r = 0, o = 0; r < m.rows(); ++r)
    if (r != skip) out.row(o++) = m.row(r);
  return out;
}

inline Matrix centered_copy(const Matrix& m) {
  const Eigen::RowVectorXd mean = m.colwise().mean();
  return m.rowwise() - mean;
}

// Seeded submodular set function on 8 players: a concave transform of a
// positive modular weight plus a coverage term over 4 shared topics.
struct ToyGame {
  std::vector<double> weight;
  std::vector<unsigned> topics;  // bitmask over 4 topics

  explicit ToyGame(std::uint64_t seed, std::size_t n = 8) : weight(n), topics(n) {
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
      weight[i] = 0.2 + rng.uniform();
      topics[i] = static_cast<unsigned>(1 + rng.below(15));
    }
  }

  double operator()(std::span<const std::size_t> subset) const {
    double w = 0.0;
    unsigned covered = 0;
    for (std::size_t i : subset) {
      w += weight[i];
      covered |= topics[i];
    }
    return std::sqrt(w) + 0.25 * std::popcount(covered);
  }
};

// Shapley values as the average marginal contribution over every ordering.
template <class Game>
std::vector<double> permutation_average_shapley(const Game& game, std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> total(n, 0.0);
  std::size_t count = 0;
  do {
    std::vector<std::size_t> prefix;
    double before = game(prefix);
    for (std::size_t i : order) {
      prefix.push_back(i);
      const double after = game(prefix);
      total[i] += after - before;
      before = after;
    }
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& t : total) t /= static_cast<double>(count);
  return total;
}

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(EXAMINE_FIXTURE_DIR) / name; }

// Fresh per-test scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("examine_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace examine::testing
