#include "examine/examine.hpp"

#include <cmath>

namespace examine {

ScoreReport examine_scores(const FeatureMatrix& features, const linalg::LooOptions& options) {
  linalg::LooSigmaResult sigma = linalg::loo_top_singular_values(features, options);
  std::vector<double> scores(sigma.lambda_without.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = std::exp(-(sigma.lambda_full - sigma.lambda_without[i]));
  }
  std::map<std::string, std::string> params{
      {"centering", options.center ? "true" : "false"},
      {"lambda_full", format_double(sigma.lambda_full)},
      {"fallback_rows", std::to_string(sigma.fallback_rows)},
      {"secular_rel_tol", "1e-12"},
      {"deflation_tol", "1e-14"},
  };
  return make_report(Method::examine, features.ids(), std::move(scores), std::move(params));
}

}  // namespace examine
