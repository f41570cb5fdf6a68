#include "examine/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "examine/errors.hpp"
#include "examine/parallel.hpp"

namespace examine::linalg {
namespace {

constexpr double kDeflationTol = 1e-14;
constexpr double kRepeatedTol = 1e-12;
constexpr double kRootRelTol = 1e-12;
constexpr int kMaxSecularIterations = 200;

void require_finite(const Matrix& data) {
  if (!data.allFinite()) throw InvalidInput("matrix contains non-finite entries");
}

Matrix centered(const Matrix& data) {
  Eigen::RowVectorXd mean = data.colwise().mean();
  Matrix out = data;
  out.rowwise() -= mean;
  return out;
}

Matrix without_row(const Matrix& data, Eigen::Index row) {
  Matrix out(data.rows() - 1, data.cols());
  out.topRows(row) = data.topRows(row);
  out.bottomRows(data.rows() - row - 1) = data.bottomRows(data.rows() - row - 1);
  return out;
}

struct Pole {
  double value;
  double weight;  // z_j^2
};

// Secular function 1 - sum w_j / (d_j - tau) with d_j = pole_j - origin.
struct Secular {
  const std::vector<Pole>& poles;
  double origin;

  void eval(double tau, double& g, double& dg) const {
    g = 1.0;
    dg = 0.0;
    for (const Pole& p : poles) {
      double d = (p.value - origin) - tau;
      double q = p.weight / d;
      g -= q;
      dg -= q / d;
    }
  }
};

}  // namespace

double top_singular_value(const Matrix& data) {
  if (data.rows() < 1 || data.cols() < 1) throw InvalidInput("empty matrix");
  require_finite(data);
  Eigen::MatrixXd gram = data.cols() <= data.rows() ? Eigen::MatrixXd(data.transpose() * data)
                                                    : Eigen::MatrixXd(data * data.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("Gram eigendecomposition failed");
  return std::sqrt(std::max(solver.eigenvalues().maxCoeff(), 0.0));
}

double top_singular_value(const FeatureMatrix& features) {
  return top_singular_value(features.data());
}

bool downdated_top_eigenvalue(const std::vector<double>& eigenvalues, const std::vector<double>& z,
                              double& root) {
  double znorm2 = 0.0;
  for (double v : z) znorm2 += v * v;
  double largest = -std::numeric_limits<double>::infinity();
  for (double v : eigenvalues) largest = std::max(largest, v);
  if (znorm2 == 0.0) {
    root = largest;
    return true;
  }

  // Directions with negligible weight keep their eigenvalue.
  const double threshold = kDeflationTol * std::sqrt(znorm2);
  double deflated_max = -std::numeric_limits<double>::infinity();
  std::vector<Pole> poles;
  for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
    if (std::abs(z[j]) < threshold) {
      deflated_max = std::max(deflated_max, eigenvalues[j]);
    } else {
      poles.push_back({eigenvalues[j], z[j] * z[j]});
    }
  }
  std::sort(poles.begin(), poles.end(), [](const Pole& a, const Pole& b) { return a.value > b.value; });

  if (poles.empty()) {
    root = deflated_max;
    return true;
  }
  const double top = poles[0].value;
  double secular_root;
  if (poles.size() == 1) {
    secular_root = top - poles[0].weight;
  } else {
    const double second = poles[1].value;
    if (top - second <= kRepeatedTol * std::abs(top)) {
      // Interlacing pins the root inside [second, top].
      secular_root = second;
    } else {
      const double mid = 0.5 * (top + second);
      double g_mid, dg_mid;
      Secular{poles, 0.0}.eval(mid, g_mid, dg_mid);
      // g decreases across (second, top); measure from the nearer pole.
      const bool near_top = g_mid > 0.0;
      const double origin = near_top ? top : second;
      double lo = near_top ? mid - top : 0.0;
      double hi = near_top ? 0.0 : mid - second;
      if (g_mid == 0.0) {
        lo = hi = mid - origin;
      }
      Secular secular{poles, origin};
      double tau = 0.5 * (lo + hi);
      bool converged = lo == hi;
      for (int it = 0; it < kMaxSecularIterations && !converged; ++it) {
        double g, dg;
        secular.eval(tau, g, dg);
        if (g == 0.0) {
          converged = true;
          break;
        }
        if (g > 0.0) {
          lo = tau;
        } else {
          hi = tau;
        }
        double next = tau - g / dg;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        double step = std::abs(next - tau);
        tau = next;
        double scale = std::abs(origin + tau);
        if (step <= kRootRelTol * scale || hi - lo <= kRootRelTol * scale ||
            step <= std::numeric_limits<double>::min()) {
          converged = true;
        }
      }
      if (!converged) return false;
      secular_root = origin + tau;
    }
  }
  root = std::max(deflated_max, secular_root);
  return true;
}

LooSigmaResult loo_top_singular_values(const FeatureMatrix& features, const LooOptions& options) {
  const Eigen::Index n = features.data().rows();
  const Eigen::Index c = features.data().cols();
  if (n < 2) throw InvalidInput("leave-one-out needs at least two rows");

  const Matrix data = options.center ? centered(features.data()) : features.data();
  // Re-centering the deleted submatrix turns the downdate vector into
  // sqrt(N / (N - 1)) times the centered row.
  const double scale = options.center ? std::sqrt(double(n) / double(n - 1)) : 1.0;
  const bool column_gram = c <= n;

  Eigen::MatrixXd gram = column_gram ? Eigen::MatrixXd(data.transpose() * data)
                                     : Eigen::MatrixXd(data * data.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) throw NumericalError("Gram eigendecomposition failed");

  const Eigen::Index m = gram.rows();
  std::vector<double> eigenvalues(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < m; ++j) eigenvalues[j] = std::max(solver.eigenvalues()(j), 0.0);
  const Eigen::MatrixXd& vectors = solver.eigenvectors();

  LooSigmaResult result;
  result.lambda_full = std::sqrt(*std::max_element(eigenvalues.begin(), eigenvalues.end()));
  result.lambda_without.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<char> fell_back(static_cast<std::size_t>(n), 0);

  parallel_for(static_cast<std::size_t>(n), options.threads, [&](std::size_t i) {
    const auto row = static_cast<Eigen::Index>(i);
    std::vector<double> z(static_cast<std::size_t>(m));
    if (column_gram) {
      Eigen::VectorXd w = scale * data.row(row).transpose();
      Eigen::VectorXd proj = vectors.transpose() * w;
      for (Eigen::Index j = 0; j < m; ++j) z[j] = proj(j);
    } else {
      // Row i of F is F^T e_i = V S U^T e_i, so its coordinates in the right
      // singular basis are sigma_j * U(i, j).
      for (Eigen::Index j = 0; j < m; ++j) {
        z[j] = scale * std::sqrt(eigenvalues[j]) * vectors(row, j);
      }
    }
    double root = 0.0;
    double sigma;
    if (downdated_top_eigenvalue(eigenvalues, z, root)) {
      sigma = std::sqrt(std::max(root, 0.0));
    } else {
      Matrix sub = without_row(features.data(), row);
      if (options.center) sub = centered(sub);
      sigma = top_singular_value(sub);
      fell_back[i] = 1;
    }
    result.lambda_without[i] = std::min(sigma, result.lambda_full);
  });
  result.fallback_rows = static_cast<std::size_t>(std::count(fell_back.begin(), fell_back.end(), 1));
  return result;
}

LooSigmaResult brute_force_loo(const FeatureMatrix& features, bool center) {
  const Eigen::Index n = features.data().rows();
  if (n < 2) throw InvalidInput("leave-one-out needs at least two rows");
  auto sigma_max = [](const Matrix& m) {
    const Eigen::MatrixXd dense = m;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense);
    return svd.singularValues()(0);
  };
  const Matrix full = center ? centered(features.data()) : features.data();
  LooSigmaResult result;
  result.lambda_full = sigma_max(full);
  result.lambda_without.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Matrix sub = without_row(features.data(), i);
    if (center) sub = centered(sub);
    result.lambda_without[static_cast<std::size_t>(i)] = sigma_max(sub);
  }
  return result;
}

}  // namespace examine::linalg
