#include "examine/theory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "examine/errors.hpp"
#include "examine/rng.hpp"

namespace examine::theory {
namespace {

constexpr double kMassTol = 1e-12;
constexpr double kRankTol = 1e-10;
constexpr double kCiTol = 1e-12;

std::vector<double> random_simplex(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  double sum = 0.0;
  for (double& x : v) {
    // Bounded away from zero so every conditional is strictly positive.
    x = 0.05 + rng.uniform();
    sum += x;
  }
  for (double& x : v) x /= sum;
  return v;
}

}  // namespace

DiscreteJoint DiscreteJoint::zeros(std::size_t d1, std::size_t d2, std::size_t k) {
  DiscreteJoint j;
  j.d1 = d1;
  j.d2 = d2;
  j.k = k;
  j.p.assign(d1 * d2 * k, 0.0);
  j.x2_embedding = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d2), static_cast<Eigen::Index>(d2));
  return j;
}

void DiscreteJoint::validate() const {
  if (d1 < 1 || d2 < 1 || k < 1) throw InvalidInput("joint support sizes must be positive");
  if (p.size() != d1 * d2 * k) throw InvalidInput("joint tensor has the wrong size");
  if (x2_embedding.rows() != static_cast<Eigen::Index>(d2) || x2_embedding.cols() < 1) {
    throw InvalidInput("X2 embedding must have one row per X2 value");
  }
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput("joint probabilities must be finite and nonnegative");
    total += v;
  }
  if (std::abs(total - 1.0) > kMassTol) throw InvalidInput("joint probabilities do not sum to one");
}

void DiscreteJoint::normalize() {
  double total = 0.0;
  for (double v : p) total += v;
  for (double& v : p) v /= total;
}

DiscreteJoint make_ci_joint(std::size_t d1, std::size_t d2, std::size_t k, std::uint64_t seed) {
  if (d1 < 2 || d2 < 2 || k < 2) throw InvalidInput("d1, d2 and k must all be at least 2");
  if (k >= d2) {
    throw InvalidInput("class count k = " + std::to_string(k) + " must be smaller than d2 = " + std::to_string(d2));
  }
  Rng rng(seed);
  std::vector<double> py = random_simplex(rng, k);
  std::vector<std::vector<double>> px1(k), px2(k);
  for (std::size_t y = 0; y < k; ++y) px1[y] = random_simplex(rng, d1);
  for (std::size_t y = 0; y < k; ++y) px2[y] = random_simplex(rng, d2);
  DiscreteJoint joint = DiscreteJoint::zeros(d1, d2, k);
  for (std::size_t a = 0; a < d1; ++a) {
    for (std::size_t b = 0; b < d2; ++b) {
      for (std::size_t y = 0; y < k; ++y) joint.at(a, b, y) = py[y] * px1[y][a] * px2[y][b];
    }
  }
  return joint;
}

TheoremReport verify_theorem(const DiscreteJoint& joint) {
  joint.validate();
  const std::size_t d1 = joint.d1, d2 = joint.d2, k = joint.k;
  const Eigen::MatrixXd& emb = joint.x2_embedding;
  const Eigen::Index e = emb.cols();

  std::vector<double> p_a(d1, 0.0), p_y(k, 0.0);
  Eigen::MatrixXd p_ay = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d1), static_cast<Eigen::Index>(k));
  Eigen::MatrixXd p_by = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d2), static_cast<Eigen::Index>(k));
  for (std::size_t a = 0; a < d1; ++a) {
    for (std::size_t b = 0; b < d2; ++b) {
      for (std::size_t y = 0; y < k; ++y) {
        const double v = joint.at(a, b, y);
        p_a[a] += v;
        p_y[y] += v;
        p_ay(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(y)) += v;
        p_by(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(y)) += v;
      }
    }
  }
  for (std::size_t a = 0; a < d1; ++a) {
    if (!(p_a[a] > 0.0)) throw InvalidInput("P(X1 = " + std::to_string(a) + ") is zero");
  }

  TheoremReport report;
  for (std::size_t a = 0; a < d1; ++a) {
    for (std::size_t b = 0; b < d2; ++b) {
      for (std::size_t y = 0; y < k; ++y) {
        if (p_y[y] <= 0.0) continue;
        const double lhs = joint.at(a, b, y) / p_y[y];
        const double rhs = (p_ay(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(y)) / p_y[y]) *
                           (p_by(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(y)) / p_y[y]);
        report.ci_violation = std::max(report.ci_violation, std::abs(lhs - rhs));
      }
    }
  }
  report.ci_holds = report.ci_violation <= kCiTol;

  // A(y, :) = E[emb(X2) | Y = y]; rows with P(y) = 0 stay zero.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), e);
  for (std::size_t y = 0; y < k; ++y) {
    if (p_y[y] <= 0.0) continue;
    for (std::size_t b = 0; b < d2; ++b) {
      A.row(static_cast<Eigen::Index>(y)) +=
          (p_by(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(y)) / p_y[y]) *
          emb.row(static_cast<Eigen::Index>(b));
    }
  }

  // f*(a) = E[emb(X2) | X1 = a], h(a) = P(Y = . | X1 = a).
  Eigen::MatrixXd f_star = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d1), e);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d1), static_cast<Eigen::Index>(k));
  for (std::size_t a = 0; a < d1; ++a) {
    const auto ai = static_cast<Eigen::Index>(a);
    for (std::size_t b = 0; b < d2; ++b) {
      double p_ab = 0.0;
      for (std::size_t y = 0; y < k; ++y) p_ab += joint.at(a, b, y);
      f_star.row(ai) += (p_ab / p_a[a]) * emb.row(static_cast<Eigen::Index>(b));
    }
    for (std::size_t y = 0; y < k; ++y) {
      h(ai, static_cast<Eigen::Index>(y)) = p_ay(ai, static_cast<Eigen::Index>(y)) / p_a[a];
    }
  }

  const Eigen::MatrixXd reconstructed = h * A;
  report.reconstruction_residual = (f_star - reconstructed).cwiseAbs().maxCoeff();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > kRankTol * sigma_max) ++rank;
  }
  report.a_rank = rank;
  if (rank == k) {
    // f*(a) = A^T h(a); recover h(a) = pinv(A^T) f*(a) = U S^-1 V^T f*(a).
    Eigen::MatrixXd pinv_at = svd.matrixU() * sigma.cwiseInverse().asDiagonal() * svd.matrixV().transpose();
    const Eigen::MatrixXd recovered = f_star * pinv_at.transpose();
    report.recovery_residual = (recovered - h).cwiseAbs().maxCoeff();
  }
  return report;
}

}  // namespace examine::theory
