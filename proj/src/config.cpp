#include "examine/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <string>

#include "examine/errors.hpp"

namespace examine {
namespace {

using nlohmann::json;

class Checker {
 public:
  // Records keys of `obj` (at `path`) that are not in `allowed`.
  void keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw InvalidInput("config section '" + path + "' must be an object");
    for (const auto& [key, value] : obj.items()) {
      bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
      if (!known) unknown_.push_back(path.empty() ? key : path + "." + key);
    }
  }

  void finish() const {
    if (unknown_.empty()) return;
    std::string msg = "unknown config keys:";
    for (const auto& k : unknown_) msg += " " + k;
    throw InvalidInput(msg);
  }

 private:
  std::vector<std::string> unknown_;
};

template <typename T>
void read_field(const json& obj, const char* key, T& out, const std::string& path) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidInput("config key '" + (path.empty() ? std::string(key) : path + "." + key) + "' has the wrong type");
  }
}

void read_size(const json& obj, const char* key, std::size_t& out, const std::string& path) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw InvalidInput("config key '" + path + "." + key + "' must be a nonnegative integer");
  }
  out = v.get<std::size_t>();
}

}  // namespace

RunConfig parse_config(const json& doc) {
  Checker check;
  check.keys(doc, "", {"seed", "clusters", "corruption", "splits", "train", "tmc", "curve", "bench", "center"});
  RunConfig cfg;
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw InvalidInput("config key 'seed' must be a nonnegative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  read_field(doc, "center", cfg.center, "");

  if (doc.contains("clusters")) {
    const json& s = doc["clusters"];
    check.keys(s, "clusters", {"classes", "dim", "intra_std"});
    read_field(s, "classes", cfg.clusters.classes, "clusters");
    read_size(s, "dim", cfg.clusters.dim, "clusters");
    read_field(s, "intra_std", cfg.clusters.intra_std, "clusters");
  }
  if (doc.contains("corruption")) {
    const json& s = doc["corruption"];
    check.keys(s, "corruption", {"levels", "per_level_count", "clean_count"});
    read_field(s, "levels", cfg.corruption.levels, "corruption");
    read_size(s, "clean_count", cfg.corruption.clean_count, "corruption");
    if (s.contains("per_level_count")) {
      const json& c = s["per_level_count"];
      if (c.is_number_integer()) {
        std::size_t each = 0;
        read_size(s, "per_level_count", each, "corruption");
        cfg.corruption.per_level_count.assign(cfg.corruption.levels.size(), each);
      } else {
        read_field(s, "per_level_count", cfg.corruption.per_level_count, "corruption");
      }
    } else if (cfg.corruption.per_level_count.size() != cfg.corruption.levels.size()) {
      cfg.corruption.per_level_count.assign(cfg.corruption.levels.size(), 100);
    }
  }
  if (doc.contains("splits")) {
    const json& s = doc["splits"];
    check.keys(s, "splits", {"clean_train", "validation"});
    read_size(s, "clean_train", cfg.splits.clean_train, "splits");
    read_size(s, "validation", cfg.splits.validation, "splits");
  }
  if (doc.contains("train")) {
    const json& s = doc["train"];
    check.keys(s, "train", {"learning_rate", "iterations", "l2"});
    read_field(s, "learning_rate", cfg.train.learning_rate, "train");
    read_field(s, "iterations", cfg.train.iterations, "train");
    read_field(s, "l2", cfg.train.l2, "train");
  }
  if (doc.contains("tmc")) {
    const json& s = doc["tmc"];
    check.keys(s, "tmc", {"max_permutations", "truncation_tolerance", "convergence_threshold", "convergence_window"});
    read_size(s, "max_permutations", cfg.tmc.max_permutations, "tmc");
    read_field(s, "truncation_tolerance", cfg.tmc.truncation_tolerance, "tmc");
    read_field(s, "convergence_threshold", cfg.tmc.convergence_threshold, "tmc");
    read_size(s, "convergence_window", cfg.tmc.convergence_window, "tmc");
  }
  if (doc.contains("curve")) {
    const json& s = doc["curve"];
    check.keys(s, "curve", {"step", "seeds", "order"});
    read_size(s, "step", cfg.curve_step, "curve");
    read_field(s, "seeds", cfg.curve_seeds, "curve");
    if (s.contains("order")) {
      std::string order;
      read_field(s, "order", order, "curve");
      cfg.curve_order = experiments::parse_curve_order(order);
    }
  }
  if (doc.contains("bench")) {
    const json& s = doc["bench"];
    check.keys(s, "bench", {"methods"});
    if (s.contains("methods")) {
      std::vector<std::string> names;
      read_field(s, "methods", names, "bench");
      cfg.bench_methods.clear();
      for (const auto& name : names) cfg.bench_methods.push_back(parse_method(name));
    }
  }
  check.finish();

  cfg.clusters.validate();
  cfg.corruption.validate();
  cfg.train.validate();
  cfg.tmc.seed = cfg.seed;
  cfg.tmc.validate();
  if (cfg.curve_step < 1) throw InvalidInput("curve.step must be at least 1");
  if (cfg.curve_seeds.empty()) throw InvalidInput("curve.seeds must not be empty");
  if (cfg.bench_methods.empty()) throw InvalidInput("bench.methods must not be empty");
  return cfg;
}

RunConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

}  // namespace examine
