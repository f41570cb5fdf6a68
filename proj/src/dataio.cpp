#include "examine/dataio.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "examine/errors.hpp"

namespace examine::dataio {
namespace {

using nlohmann::ordered_json;

void put_bytes(std::string& out, std::uint64_t value, int width) {
  for (int i = 0; i < width; ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
}

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  std::uint64_t take(int width, const char* what) {
    if (remaining() < static_cast<std::size_t>(width)) {
      throw FormatError(std::string("EXMF payload truncated while reading ") + what);
    }
    std::uint64_t value = 0;
    for (int i = 0; i < width; ++i) {
      value |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(width);
    return value;
  }

  std::string_view take_string(std::size_t length) {
    if (remaining() < length) throw FormatError("EXMF payload truncated in id table");
    std::string_view s = bytes_.substr(pos_, length);
    pos_ += length;
    return s;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

void check_writable_id(const std::string& id) {
  if (id.empty()) throw InvalidInput("item ids must be nonempty");
  if (id.find_first_of(",\"\r\n") != std::string::npos) {
    throw InvalidInput("item id '" + id + "' contains a comma, quote or newline");
  }
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t end = line.find(sep, start);
    if (end == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, end - start));
    start = end + 1;
  }
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::string_view line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

double parse_double(std::string_view field, const std::string& where) {
  double value = 0.0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw InvalidInput(where + ": cannot parse '" + std::string(field) + "' as a number");
  }
  if (!std::isfinite(value)) throw InvalidInput(where + ": non-finite value '" + std::string(field) + "'");
  return value;
}

long long parse_int(std::string_view field, const std::string& where) {
  long long value = 0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw InvalidInput(where + ": cannot parse '" + std::string(field) + "' as an integer");
  }
  return value;
}

FeatureData make_feature_data(std::vector<std::string> ids, Matrix data, std::vector<int> labels, bool has_labels) {
  FeatureMatrix features(std::move(ids), std::move(data));
  if (!has_labels) return features;
  int max_label = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) throw InvalidInput("negative label at row " + std::to_string(i));
    max_label = std::max(max_label, labels[i]);
  }
  return LabeledSet(std::move(features), std::move(labels), std::max(2, max_label + 1));
}

std::string csv_row_where(std::size_t row, std::size_t line) {
  return "row " + std::to_string(row) + " (line " + std::to_string(line) + ")";
}

std::string encode_features(const FeatureMatrix& features, const std::vector<int>* labels, FileFormat format) {
  return format == FileFormat::exmf ? encode_exmf(features, labels) : encode_csv(features, labels);
}

const ordered_json& require(const ordered_json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return doc.at(key);
}

}  // namespace

std::string_view format_name(FileFormat format) { return format == FileFormat::csv ? "csv" : "exmf"; }

FileFormat parse_format(std::string_view name) {
  if (name == "csv") return FileFormat::csv;
  if (name == "exmf") return FileFormat::exmf;
  throw InvalidInput("unknown feature file format '" + std::string(name) + "'");
}

FileFormat detect_format(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  char head[4] = {};
  in.read(head, 4);
  if (in.gcount() == 4 && std::memcmp(head, kExmfMagic, 4) == 0) return FileFormat::exmf;
  return FileFormat::csv;
}

std::string encode_exmf(const FeatureMatrix& features, const std::vector<int>* labels) {
  if (labels != nullptr && labels->size() != features.rows()) throw InvalidInput("label count mismatch");
  std::string out(kExmfMagic, 4);
  put_bytes(out, kExmfVersion, 4);
  put_bytes(out, labels != nullptr ? kExmfFlagLabels : 0u, 4);
  put_bytes(out, features.rows(), 8);
  put_bytes(out, features.cols(), 8);
  for (const auto& id : features.ids()) {
    if (id.empty()) throw InvalidInput("item ids must be nonempty");
    put_bytes(out, id.size(), 4);
    out += id;
  }
  if (labels != nullptr) {
    for (int label : *labels) put_bytes(out, static_cast<std::uint32_t>(label), 4);
  }
  const Matrix& data = features.data();
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) put_bytes(out, std::bit_cast<std::uint64_t>(data(r, c)), 8);
  }
  return out;
}

FeatureData decode_exmf(std::string_view bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kExmfMagic, 4) != 0) throw FormatError("bad EXMF magic");
  ByteReader in(bytes.substr(4));
  const auto version = static_cast<std::uint32_t>(in.take(4, "version"));
  if (version != kExmfVersion) throw FormatError("unsupported EXMF version " + std::to_string(version));
  const auto flags = static_cast<std::uint32_t>(in.take(4, "flags"));
  if (flags & ~kExmfFlagLabels) throw FormatError("unknown EXMF flag bits");
  const bool has_labels = (flags & kExmfFlagLabels) != 0;
  const std::uint64_t n = in.take(8, "row count");
  const std::uint64_t c = in.take(8, "column count");
  if (n < 1 || c < 1) throw FormatError("EXMF declares an empty matrix");
  // Every row needs at least a 4-byte id length and 8 bytes per value.
  if (n > in.remaining() / 4 || c > in.remaining() / 8 || n * c > in.remaining() / 8) {
    throw FormatError("EXMF declared sizes exceed payload length");
  }
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t length = in.take(4, "id length");
    ids.emplace_back(in.take_string(length));
  }
  std::vector<int> labels;
  if (has_labels) {
    labels.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      labels.push_back(static_cast<int>(static_cast<std::int32_t>(static_cast<std::uint32_t>(in.take(4, "labels")))));
    }
  }
  Matrix data(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(c));
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index col = 0; col < data.cols(); ++col) {
      data(r, col) = std::bit_cast<double>(in.take(8, "data"));
    }
  }
  if (in.remaining() != 0) throw FormatError("EXMF declared sizes do not match payload length");
  return make_feature_data(std::move(ids), std::move(data), std::move(labels), has_labels);
}

std::string encode_csv(const FeatureMatrix& features, const std::vector<int>* labels) {
  if (labels != nullptr && labels->size() != features.rows()) throw InvalidInput("label count mismatch");
  std::string out = "id";
  if (labels != nullptr) out += ",label";
  for (std::size_t c = 0; c < features.cols(); ++c) out += ",f" + std::to_string(c);
  out += '\n';
  const Matrix& data = features.data();
  for (std::size_t r = 0; r < features.rows(); ++r) {
    check_writable_id(features.ids()[r]);
    out += features.ids()[r];
    if (labels != nullptr) out += "," + std::to_string((*labels)[r]);
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      out += ',';
      out += format_double(data(static_cast<Eigen::Index>(r), c));
    }
    out += '\n';
  }
  return out;
}

FeatureData decode_csv(std::string_view text) {
  const std::vector<std::string_view> lines = lines_of(text);
  if (lines.empty()) throw InvalidInput("CSV feature file is empty");
  const std::vector<std::string_view> header = split(lines[0], ',');
  if (header.empty() || header[0] != "id") throw InvalidInput("CSV header must start with 'id'");
  const bool has_labels = header.size() > 1 && header[1] == "label";
  const std::size_t first_feature = has_labels ? 2 : 1;
  const std::size_t c = header.size() - first_feature;
  if (c < 1) throw InvalidInput("CSV header declares no feature columns");
  for (std::size_t j = 0; j < c; ++j) {
    if (header[first_feature + j] != "f" + std::to_string(j)) {
      throw InvalidInput("CSV header column " + std::to_string(first_feature + j) + " should be 'f" +
                         std::to_string(j) + "', found '" + std::string(header[first_feature + j]) + "'");
    }
  }
  const std::size_t n = lines.size() - 1;
  if (n < 1) throw InvalidInput("CSV feature file has no data rows");
  std::vector<std::string> ids;
  ids.reserve(n);
  std::vector<int> labels;
  Matrix data(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(c));
  for (std::size_t r = 0; r < n; ++r) {
    const std::string where = csv_row_where(r, r + 2);
    const std::vector<std::string_view> fields = split(lines[r + 1], ',');
    if (fields.size() != header.size()) {
      throw InvalidInput(where + " has " + std::to_string(fields.size()) + " columns, expected " +
                         std::to_string(header.size()));
    }
    if (fields[0].empty()) throw InvalidInput(where + " has an empty id");
    ids.emplace_back(fields[0]);
    if (has_labels) {
      long long label = parse_int(fields[1], where);
      if (label < 0 || label > std::numeric_limits<std::int32_t>::max()) {
        throw InvalidInput(where + ": label out of range");
      }
      labels.push_back(static_cast<int>(label));
    }
    for (std::size_t j = 0; j < c; ++j) {
      data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = parse_double(fields[first_feature + j], where);
    }
  }
  return make_feature_data(std::move(ids), std::move(data), std::move(labels), has_labels);
}

FeatureData read_features(const std::filesystem::path& path) { return read_features(path, detect_format(path)); }

FeatureData read_features(const std::filesystem::path& path, FileFormat format) {
  const std::string bytes = read_text(path);
  if (format == FileFormat::exmf) return decode_exmf(bytes);
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kExmfMagic, 4) == 0) {
    throw FormatError("'" + path.string() + "' is an EXMF file, not CSV");
  }
  return decode_csv(bytes);
}

FeatureMatrix read_feature_matrix(const std::filesystem::path& path) {
  FeatureData data = read_features(path);
  if (auto* labeled = std::get_if<LabeledSet>(&data)) return labeled->features();
  return std::get<FeatureMatrix>(std::move(data));
}

LabeledSet read_labeled_set(const std::filesystem::path& path, int min_classes) {
  FeatureData data = read_features(path);
  auto* labeled = std::get_if<LabeledSet>(&data);
  if (labeled == nullptr) throw InvalidInput("'" + path.string() + "' has no label column");
  if (labeled->num_classes() >= min_classes) return std::move(*labeled);
  return LabeledSet(labeled->features(), labeled->labels(), min_classes);
}

void write_features(const FeatureMatrix& features, const std::filesystem::path& path, FileFormat format) {
  write_text(path, encode_features(features, nullptr, format));
}

void write_features(const LabeledSet& set, const std::filesystem::path& path, FileFormat format) {
  write_text(path, encode_features(set.features(), &set.labels(), format));
}

void write_truth(const synth::AssessedSet& assessed, const std::filesystem::path& path) {
  std::string out = "id,label,corruption_level\n";
  const auto& ids = assessed.data.features().ids();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    check_writable_id(ids[i]);
    out += ids[i] + "," + std::to_string(assessed.data.labels()[i]) + "," +
           format_double(assessed.corruption_level[i]) + "\n";
  }
  write_text(path, out);
}

Truth read_truth(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0] != "id,label,corruption_level") {
    throw InvalidInput("truth file header must be 'id,label,corruption_level'");
  }
  Truth truth;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::string where = csv_row_where(r - 1, r + 1);
    const auto fields = split(lines[r], ',');
    if (fields.size() != 3) throw InvalidInput(where + " should have 3 columns");
    truth.ids.emplace_back(fields[0]);
    truth.labels.push_back(static_cast<int>(parse_int(fields[1], where)));
    truth.corruption_level.push_back(parse_double(fields[2], where));
  }
  return truth;
}

ordered_json report_to_json(const ScoreReport& report) {
  ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["kind"] = "score_report";
  doc["method"] = std::string(method_name(report.method));
  doc["seed"] = report.seed ? ordered_json(*report.seed) : ordered_json(nullptr);
  ordered_json params = ordered_json::object();
  for (const auto& [k, v] : report.params) params[k] = v;
  doc["params"] = std::move(params);
  doc["created_at"] = report.created_at;
  ordered_json scores = ordered_json::object();
  for (std::size_t i = 0; i < report.ids.size(); ++i) {
    if (!std::isfinite(report.scores[i])) throw InvalidInput("non-finite score for '" + report.ids[i] + "'");
    scores[report.ids[i]] = report.scores[i];
  }
  doc["scores"] = std::move(scores);
  doc["ranking"] = report.ranking;
  return doc;
}

ScoreReport report_from_json(const ordered_json& doc) {
  if (require(doc, "schema_version") != kReportSchemaVersion) throw FormatError("unsupported report schema version");
  if (require(doc, "kind") != "score_report") throw FormatError("document is not a score report");
  try {
    std::vector<std::string> ids;
    std::vector<double> scores;
    for (const auto& [id, value] : require(doc, "scores").items()) {
      ids.push_back(id);
      scores.push_back(value.get<double>());
    }
    std::map<std::string, std::string> params;
    for (const auto& [k, v] : require(doc, "params").items()) params[k] = v.get<std::string>();
    const auto& seed_field = require(doc, "seed");
    std::optional<std::uint64_t> seed;
    if (!seed_field.is_null()) seed = seed_field.get<std::uint64_t>();
    ScoreReport report = make_report(parse_method(require(doc, "method").get<std::string>()), std::move(ids),
                                     std::move(scores), std::move(params), seed);
    report.created_at = require(doc, "created_at").get<std::string>();
    if (require(doc, "ranking").get<std::vector<std::string>>() != report.ranking) {
      throw InvalidInput("report ranking is inconsistent with its scores");
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed score report: ") + e.what());
  }
}

void write_report(const ScoreReport& report, const std::filesystem::path& path) {
  write_text(path, dump(report_to_json(report)));
}

ScoreReport read_report(const std::filesystem::path& path) {
  try {
    return report_from_json(ordered_json::parse(read_text(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

ordered_json curve_to_json(const experiments::CurveSeries& series) {
  ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["kind"] = "curve";
  doc["method"] = series.method;
  doc["mode"] = std::string(experiments::curve_mode_name(series.mode));
  doc["order"] = std::string(experiments::curve_order_name(series.order));
  ordered_json points = ordered_json::array();
  for (const auto& p : series.points) {
    points.push_back({{"n_selected", p.n_selected}, {"mean_accuracy", p.mean_accuracy}, {"std_accuracy", p.std_accuracy}});
  }
  doc["points"] = std::move(points);
  return doc;
}

experiments::CurveSeries curve_from_json(const ordered_json& doc) {
  if (require(doc, "schema_version") != kReportSchemaVersion) throw FormatError("unsupported curve schema version");
  if (require(doc, "kind") != "curve") throw FormatError("document is not a curve");
  try {
    experiments::CurveSeries series;
    series.method = require(doc, "method").get<std::string>();
    series.mode = experiments::parse_curve_mode(require(doc, "mode").get<std::string>());
    series.order = experiments::parse_curve_order(require(doc, "order").get<std::string>());
    for (const auto& p : require(doc, "points")) {
      series.points.push_back({require(p, "n_selected").get<std::size_t>(), require(p, "mean_accuracy").get<double>(),
                               require(p, "std_accuracy").get<double>()});
    }
    return series;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed curve: ") + e.what());
  }
}

std::string curve_to_csv(const experiments::CurveSeries& series) {
  std::string out = "n_selected,mean_accuracy,std_accuracy\n";
  for (const auto& p : series.points) {
    out += std::to_string(p.n_selected) + "," + format_double(p.mean_accuracy) + "," + format_double(p.std_accuracy) +
           "\n";
  }
  return out;
}

void write_curve(const experiments::CurveSeries& series, const std::filesystem::path& path) {
  if (path.extension() == ".csv") {
    write_text(path, curve_to_csv(series));
  } else {
    write_text(path, dump(curve_to_json(series)));
  }
}

experiments::CurveSeries read_curve(const std::filesystem::path& path) {
  try {
    return curve_from_json(ordered_json::parse(read_text(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

ordered_json distribution_to_json(const experiments::DistributionReport& report) {
  ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["kind"] = "score_distribution";
  ordered_json levels = ordered_json::array();
  for (const auto& s : report.levels) {
    levels.push_back({{"level", s.level},
                      {"count", s.count},
                      {"mean", s.mean},
                      {"std", s.stddev},
                      {"min", s.min},
                      {"max", s.max},
                      {"histogram", s.histogram}});
  }
  doc["levels"] = std::move(levels);
  ordered_json auc = ordered_json::array();
  for (const auto& a : report.auc) {
    auc.push_back({{"lower_level", a.lower_level}, {"higher_level", a.higher_level}, {"auc", a.auc}});
  }
  doc["auc"] = std::move(auc);
  return doc;
}

ordered_json timing_to_json(const experiments::TimingReport& report) {
  ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["kind"] = "timing";
  ordered_json entries = ordered_json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"method", std::string(method_name(e.method))},
                       {"seconds", e.seconds},
                       {"utility_evaluations", e.utility_evaluations}});
  }
  doc["methods"] = std::move(entries);
  return doc;
}

ordered_json theorem_to_json(const theory::TheoremReport& report) {
  ordered_json doc;
  doc["reconstruction_residual"] = report.reconstruction_residual;
  doc["recovery_residual"] =
      report.recovery_residual ? ordered_json(*report.recovery_residual) : ordered_json(nullptr);
  doc["a_rank"] = report.a_rank;
  doc["ci_holds"] = report.ci_holds;
  doc["ci_violation"] = report.ci_violation;
  return doc;
}

std::string dump(const ordered_json& doc) { return doc.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw InvalidInput("failed writing '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace examine::dataio
