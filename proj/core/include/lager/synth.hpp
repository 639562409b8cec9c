#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lager/geometry.hpp"
#include "lager/pipeline.hpp"

namespace lager::synth {

// Synthetic skulls live in an anatomical frame: +x lateral towards the right
// side, +y anterior, +z superior. The symmetric models are mirror-symmetric
// about x = 0.

enum class DeformityKind {
  HorizontalCondylarHyperplasia,
  VerticalCondylarHyperplasia,
  HemifacialType1,
  HemifacialType2,
};

std::string_view to_string(DeformityKind kind);
// Accepts the full snake_case names and the short forms hch, vch, type1, type2.
std::optional<DeformityKind> parse_deformity_kind(std::string_view text);
std::span<const DeformityKind> all_deformity_kinds();

struct DeformitySpec {
  DeformityKind kind = DeformityKind::HorizontalCondylarHyperplasia;
  Side side = Side::Right;  // Right or Left
  double magnitude = 6.0;   // mm, at the region core
  // Pair names (displaced on `side`) and midline landmarks (chin drift).
  std::vector<std::string> affected;
};

double default_magnitude(DeformityKind kind);
std::vector<std::string> default_affected(DeformityKind kind);
DeformitySpec default_deformity(DeformityKind kind, Side side = Side::Right);

struct DeformityCase {
  LandmarkSet ground_truth_set;  // perfectly symmetric
  Plane ground_truth_plane;
  LandmarkSet deformed_set;  // morphed, then noise on the unaffected points
  DeformitySpec spec;
  std::uint64_t noise_seed = 0;
  double noise_sd = 0.0;
};

struct ClinicalCriteria {
  double max_theta_deg = 2.0;
  double max_dist_n = 1.0;
  double max_dist_u1 = 1.0;
  double max_dist_pg = 2.0;
};

struct ValidationMetrics {
  double theta = 0.0;    // degrees between ground truth and fitted plane
  double dist_n = 0.0;   // mm, symmetric-model nasion to fitted plane
  double dist_u1 = 0.0;  // mm, upper dental midline
  double dist_pg = 0.0;  // mm, pogonion
  bool pass = false;
  friend bool operator==(const ValidationMetrics&, const ValidationMetrics&) = default;
};

// theta < 2 deg, DistN < 1 mm, DistU1 < 1 mm, DistPg < 2 mm by default.
bool meets_criteria(const ValidationMetrics& m, const ClinicalCriteria& criteria = {});

// Nominal catalog landmarks, symmetric about x = 0.
LandmarkSet nominal_landmarks();

// Nominal landmarks jittered uniformly within +-jitter mm per coordinate,
// then made exactly symmetric about x = 0.
LandmarkSet random_symmetric_base(std::uint64_t seed, double jitter = 15.0);

// Left members become mirror images of the right members; midline landmarks
// are projected onto the plane.
LandmarkSet symmetrize(const LandmarkSet& set, const Plane& plane);

std::vector<PointId> affected_points(const LandmarkSet& set, const DeformitySpec& spec);
std::vector<PointId> unaffected_points(const LandmarkSet& set, const DeformitySpec& spec);

// Displaces the affected landmarks; everything else is untouched. Throws
// InputError for an affected name missing from the set or a bad spec.
LandmarkSet apply_deformity(const LandmarkSet& set, const DeformitySpec& spec);

// Independent zero-mean Gaussian offsets, standard deviation `sd` per
// coordinate, on the listed points only. Same arguments, same output.
LandmarkSet add_fluctuating_noise(const LandmarkSet& set, std::span<const PointId> points, double sd,
                                  std::uint64_t seed);

DeformityCase make_case(const LandmarkSet& symmetric_set, const Plane& plane, const DeformitySpec& spec,
                        double noise_sd, std::uint64_t noise_seed);

ValidationMetrics outcome_metrics(const Plane& fitted, const Plane& ground_truth,
                                  const LandmarkSet& symmetric_reference, const ClinicalCriteria& criteria = {});
ValidationMetrics outcome_metrics(const Plane& fitted, const DeformityCase& c, const ClinicalCriteria& criteria = {});

// Derives statistically independent sub-seeds from one run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

struct BenchmarkConfig {
  std::size_t n_subjects = 5;
  std::vector<DeformitySpec> templates;  // empty: one default spec per kind
  double noise_sd = 3.0;
  std::uint64_t seed = 20180611;
  PipelineOptions pipeline;
  ClinicalCriteria criteria;
};

struct BenchmarkRow {
  std::size_t subject = 0;
  DeformitySpec spec;
  std::uint64_t noise_seed = 0;
  double mean_t = 0.0;
  Severity severity = Severity::Normal;
  std::size_t dropped = 0;
  std::optional<ValidationMetrics> metrics;          // with outlier dropping
  std::optional<ValidationMetrics> no_drop_metrics;  // every weight 1
  std::vector<std::string> warnings;
  std::string error;  // set when the case could not be evaluated
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  bool all_pass() const;
};

std::vector<DeformityCase> generate_cases(const BenchmarkConfig& config);
BenchmarkRow evaluate_case(const DeformityCase& c, const PipelineOptions& options,
                           const ClinicalCriteria& criteria = {});
BenchmarkReport run_benchmark(const BenchmarkConfig& config);

}  // namespace lager::synth
