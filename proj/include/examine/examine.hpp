#pragma once

#include "examine/feature_matrix.hpp"
#include "examine/linalg.hpp"
#include "examine/score_report.hpp"

namespace examine {

// Label-free quality score per row: exp(-(lambda_S - lambda_{S\i})), where
// lambda is the top singular value of the feature matrix. Scores lie in
// (0, 1]; 1 means removing the row leaves the top singular value unchanged.
ScoreReport examine_scores(const FeatureMatrix& features, const linalg::LooOptions& options = {});

}  // namespace examine
