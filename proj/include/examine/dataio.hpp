#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "examine/experiments.hpp"
#include "examine/feature_matrix.hpp"
#include "examine/score_report.hpp"
#include "examine/theory.hpp"

namespace examine::dataio {

enum class FileFormat { csv, exmf };

std::string_view format_name(FileFormat format);
FileFormat parse_format(std::string_view name);
// EXMF when the file starts with the magic bytes, CSV otherwise.
FileFormat detect_format(const std::filesystem::path& path);

inline constexpr char kExmfMagic[4] = {'E', 'X', 'M', 'F'};
inline constexpr std::uint32_t kExmfVersion = 1;
inline constexpr std::uint32_t kExmfFlagLabels = 1u << 0;
inline constexpr int kReportSchemaVersion = 1;

// A feature file holds labels iff its header (CSV) or flags (EXMF) say so.
using FeatureData = std::variant<FeatureMatrix, LabeledSet>;

FeatureData read_features(const std::filesystem::path& path);
FeatureData read_features(const std::filesystem::path& path, FileFormat format);
// Labels, when present, are dropped.
FeatureMatrix read_feature_matrix(const std::filesystem::path& path);
// Requires a label column. The class count is max(min_classes, max label + 1).
LabeledSet read_labeled_set(const std::filesystem::path& path, int min_classes = 2);

void write_features(const FeatureMatrix& features, const std::filesystem::path& path, FileFormat format);
void write_features(const LabeledSet& set, const std::filesystem::path& path, FileFormat format);

// In-memory codecs; the file functions above wrap these.
std::string encode_exmf(const FeatureMatrix& features, const std::vector<int>* labels);
FeatureData decode_exmf(std::string_view bytes);
std::string encode_csv(const FeatureMatrix& features, const std::vector<int>* labels);
FeatureData decode_csv(std::string_view text);

// Ground-truth sidecar: `id,label,corruption_level`.
void write_truth(const synth::AssessedSet& assessed, const std::filesystem::path& path);
struct Truth {
  std::vector<std::string> ids;
  std::vector<int> labels;
  std::vector<double> corruption_level;
};
Truth read_truth(const std::filesystem::path& path);

nlohmann::ordered_json report_to_json(const ScoreReport& report);
ScoreReport report_from_json(const nlohmann::ordered_json& doc);
void write_report(const ScoreReport& report, const std::filesystem::path& path);
ScoreReport read_report(const std::filesystem::path& path);

nlohmann::ordered_json curve_to_json(const experiments::CurveSeries& series);
experiments::CurveSeries curve_from_json(const nlohmann::ordered_json& doc);
std::string curve_to_csv(const experiments::CurveSeries& series);
void write_curve(const experiments::CurveSeries& series, const std::filesystem::path& path);
experiments::CurveSeries read_curve(const std::filesystem::path& path);

nlohmann::ordered_json distribution_to_json(const experiments::DistributionReport& report);
nlohmann::ordered_json timing_to_json(const experiments::TimingReport& report);
nlohmann::ordered_json theorem_to_json(const theory::TheoremReport& report);

// Deterministic text of a JSON document (two-space indent, trailing newline).
std::string dump(const nlohmann::ordered_json& doc);
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace examine::dataio
