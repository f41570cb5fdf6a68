#pragma once

#include <cstddef>
#include <vector>

#include "examine/feature_matrix.hpp"

namespace examine::linalg {

// Largest singular value, via the eigendecomposition of the smaller Gram
// matrix. Throws InvalidInput on non-finite entries.
double top_singular_value(const Matrix& data);
double top_singular_value(const FeatureMatrix& features);

struct LooOptions {
  // Subtract column means first; each row-deleted submatrix is re-centered
  // on its own mean, so the scores describe the covariance spectrum.
  bool center = false;
  unsigned threads = 1;
};

struct LooSigmaResult {
  double lambda_full = 0.0;
  // lambda_without[i] is the top singular value with row i deleted.
  std::vector<double> lambda_without;
  // Rows whose secular solve did not converge and were recomputed directly.
  std::size_t fallback_rows = 0;
};

// Top singular value of every row-deleted submatrix from one Gram
// eigendecomposition plus one rank-one secular solve per row.
LooSigmaResult loo_top_singular_values(const FeatureMatrix& features, const LooOptions& options = {});

// Reference: independent full SVD of each row-deleted submatrix.
LooSigmaResult brute_force_loo(const FeatureMatrix& features, bool center = false);

// Largest eigenvalue of diag(eigenvalues) - z z^T, where `eigenvalues` are the
// (nonnegative) poles. Returns false on non-convergence, leaving `root` unset.
bool downdated_top_eigenvalue(const std::vector<double>& eigenvalues, const std::vector<double>& z,
                              double& root);

}  // namespace examine::linalg
