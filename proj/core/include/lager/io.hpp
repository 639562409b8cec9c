#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lager/geometry.hpp"
#include "lager/pipeline.hpp"
#include "lager/synth.hpp"

namespace lager::io {

// All documents are JSON objects carrying this version string.
inline constexpr std::string_view kFormatVersion = "1";

// Raised for any malformed document. The message names the line and column
// for syntax errors, or the offending field path (e.g. pairs[2].left_xyz).
class FormatError : public InputError {
 public:
  using InputError::InputError;
};

// {"format_version", "units": "mm", "unpaired": [{"name", "xyz"}],
//  "pairs": [{"name", "right_xyz", "left_xyz"}]}
// Unknown fields are rejected; the result passes validate_landmark_set.
LandmarkSet parse_landmark_file(std::string_view text);
std::string write_landmark_file(const LandmarkSet& set);

// {"format_version", "units": "mm", "normal": [x, y, z], "offset": d}
// Values are written with 17 significant digits, so parse_plane(write_plane(p))
// reproduces p bit for bit. The normal is canonicalized on read.
std::string write_plane(const Plane& plane);
Plane parse_plane(std::string_view text);

std::string write_case(const synth::DeformityCase& c);
synth::DeformityCase parse_case(std::string_view text);

// Accepts either a plane document or a case document (its ground-truth plane).
Plane parse_ground_truth(std::string_view text);

struct ReportStage {
  std::size_t index = 0;       // number of units removed before this stage
  std::size_t point_count = 0;
  std::vector<UnitScore> scores;
  friend bool operator==(const ReportStage&, const ReportStage&) = default;
};

struct ReportFit {
  double gamma = 0.0;
  std::size_t iterations = 0;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  double gradient_norm = 0.0;
  bool converged = false;
  std::string stop_reason;
  friend bool operator==(const ReportFit&, const ReportFit&) = default;
};

struct RunReport {
  std::string input_digest;  // FNV-1a 64 of the input document, hex
  bool drop_outliers = true;
  std::size_t min_points = kDefaultMinPoints;
  Severity severity = Severity::Normal;
  double mean_t = 0.0;
  std::vector<DroppableUnit> elimination_order;
  std::vector<ReportStage> stages;
  std::vector<StageStats> stage_stats;
  std::optional<std::size_t> selected_stage;
  std::vector<DroppableUnit> dropped_outliers;
  Plane plane;
  Plane initial_plane;
  ReportFit fit;
  std::optional<synth::ValidationMetrics> metrics;
  std::vector<std::string> warnings;
  friend bool operator==(const RunReport&, const RunReport&) = default;
};

std::string fnv1a_hex(std::string_view bytes);

RunReport make_report(const PipelineResult& result, const PipelineOptions& options, std::string_view input_text,
                      const std::optional<synth::ValidationMetrics>& metrics = std::nullopt);
std::string write_report(const RunReport& report);
RunReport parse_report(std::string_view text);

std::string write_benchmark_report(const synth::BenchmarkReport& report);

// Whole-file helpers; failures raise InputError naming the path.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace lager::io
