#include "examine/score_report.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <numeric>
#include <unordered_set>

#include "examine/errors.hpp"

namespace examine {

std::string_view method_name(Method method) {
  switch (method) {
    case Method::examine: return "examine";
    case Method::loo: return "loo";
    case Method::shapley_exact: return "shapley_exact";
    case Method::shapley_tmc: return "shapley_tmc";
    case Method::random: return "random";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::examine, Method::loo, Method::shapley_exact, Method::shapley_tmc,
                   Method::random}) {
    if (method_name(m) == name) return m;
  }
  throw InvalidInput("unknown valuation method '" + std::string(name) + "'");
}

double ScoreReport::score_of(const std::string& id) const {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) return scores[i];
  }
  throw InvalidInput("id '" + id + "' not in report");
}

std::vector<std::string> rank_ids(const std::vector<std::string>& ids, const std::vector<double>& scores) {
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids[a] < ids[b];
  });
  std::vector<std::string> ranking;
  ranking.reserve(ids.size());
  for (std::size_t i : order) ranking.push_back(ids[i]);
  return ranking;
}

ScoreReport make_report(Method method, std::vector<std::string> ids, std::vector<double> scores,
                        std::map<std::string, std::string> params, std::optional<std::uint64_t> seed) {
  if (ids.size() != scores.size()) throw InvalidInput("ids and scores differ in length");
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) throw InvalidInput("duplicate id '" + id + "' in report");
  }
  ScoreReport report;
  report.method = method;
  report.ranking = rank_ids(ids, scores);
  report.ids = std::move(ids);
  report.scores = std::move(scores);
  report.params = std::move(params);
  report.seed = seed;
  return report;
}

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string utc_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace examine
