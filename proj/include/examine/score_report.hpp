#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace examine {

enum class Method { examine, loo, shapley_exact, shapley_tmc, random };

std::string_view method_name(Method method);
// Throws InvalidInput for unknown names.
Method parse_method(std::string_view name);

// Per-item valuation scores. `ids` and `scores` are aligned in input order;
// `ranking` lists ids by (score descending, id ascending).
struct ScoreReport {
  Method method = Method::examine;
  std::vector<std::string> ids;
  std::vector<double> scores;
  std::vector<std::string> ranking;
  std::map<std::string, std::string> params;
  std::optional<std::uint64_t> seed;
  std::string created_at;

  double score_of(const std::string& id) const;
};

// Builds a report and its ranking; validates alignment and unique ids.
ScoreReport make_report(Method method, std::vector<std::string> ids, std::vector<double> scores,
                        std::map<std::string, std::string> params = {},
                        std::optional<std::uint64_t> seed = std::nullopt);

std::vector<std::string> rank_ids(const std::vector<std::string>& ids, const std::vector<double>& scores);

// Shortest round-trip decimal form of a double.
std::string format_double(double value);

// Current UTC time as ISO-8601.
std::string utc_timestamp();

}  // namespace examine
