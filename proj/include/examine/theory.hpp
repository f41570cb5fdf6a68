#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "examine/feature_matrix.hpp"

namespace examine::theory {

// Finite joint P(X1 = a, X2 = b, Y = y) with an embedding table for X2.
struct DiscreteJoint {
  std::size_t d1 = 0;
  std::size_t d2 = 0;
  std::size_t k = 0;
  std::vector<double> p;               // index (a * d2 + b) * k + y
  Eigen::MatrixXd x2_embedding;        // d2 x E

  double& at(std::size_t a, std::size_t b, std::size_t y) { return p[(a * d2 + b) * k + y]; }
  double at(std::size_t a, std::size_t b, std::size_t y) const { return p[(a * d2 + b) * k + y]; }

  // Uniform-zero joint with a one-hot X2 embedding.
  static DiscreteJoint zeros(std::size_t d1, std::size_t d2, std::size_t k);
  void validate() const;
  void normalize();
};

struct TheoremReport {
  // max_a || f*(a) - h(a)^T A ||_inf
  double reconstruction_residual = 0.0;
  // max_a || pinv(A^T) f*(a) - E[onehot(Y) | X1 = a] ||_inf; empty when A
  // is rank deficient.
  std::optional<double> recovery_residual;
  std::size_t a_rank = 0;
  bool ci_holds = false;
  // max over cells of |P(a, b | y) - P(a | y) P(b | y)|
  double ci_violation = 0.0;
};

// P(Y), P(X1 | Y), P(X2 | Y) from normalized uniform draws; the joint is
// their product, so X1 and X2 are independent given Y.
DiscreteJoint make_ci_joint(std::size_t d1, std::size_t d2, std::size_t k, std::uint64_t seed);

// Evaluates both sides of f*(x1) = E[X2 | X1 = x1] = h(x1)^T A by exact
// summation, then the linear recovery of the label posterior from f*.
TheoremReport verify_theorem(const DiscreteJoint& joint);

}  // namespace examine::theory
