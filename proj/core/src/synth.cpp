#include "lager/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <set>

#include "lager/catalog.hpp"

namespace lager::synth {
namespace {

struct NominalPoint {
  std::string_view name;
  double x, y, z;
};

// Rough adult skull geometry in mm, origin at sella. Pairs give the right
// member; the left member is the mirror image.
constexpr std::array<NominalPoint, 11> kNominalUnpaired{{
    {"S", 0, 0, 0},
    {"N", 0, 70, 10},
    {"Ba", 0, -8, -42},
    {"FMp", 0, -42, -40},
    {"ANS", 0, 68, -42},
    {"PNS", 0, 20, -45},
    {"U1", 0, 70, -70},
    {"L1", 0, 68, -73},
    {"Pg", 0, 65, -100},
    {"Gn", 0, 60, -108},
    {"Me", 0, 52, -112},
}};

constexpr std::array<NominalPoint, 13> kNominalPaired{{
    {"Or", 33, 58, -10},
    {"Fz", 45, 55, 15},
    {"J", 50, 45, -40},
    {"SOF", 15, 35, 0},
    {"Po", 60, -15, -10},
    {"ZMS", 40, 55, -35},
    {"U6", 25, 40, -70},
    {"L6", 24, 42, -76},
    {"Co", 50, -10, -20},
    {"SIG", 48, 0, -30},
    {"Cr", 45, 15, -30},
    {"Gos", 48, -10, -65},
    {"Goi", 46, -2, -78},
}};

// Jittered pairs keep at least this lateral half-width.
constexpr double kMinLateral = 10.0;

// Displacement fades linearly from 1 at the region core to 0 at this
// multiple of the farthest affected landmark's distance from the core.
constexpr double kTaperReach = 3.0;

struct MorphField {
  Vec3 axis;                // unit displacement direction for a right-side morph
  std::string_view core;    // pair at the centre of the morphed region
  double chin_lateral;      // +1 chin drifts to the affected side, -1 away
};

MorphField morph_field(DeformityKind kind) {
  switch (kind) {
    case DeformityKind::HorizontalCondylarHyperplasia:
      return {Vec3(0, 1, 0), "Co", -1.0};
    case DeformityKind::VerticalCondylarHyperplasia:
      return {Vec3(0, 0, -1), "Co", -1.0};
    case DeformityKind::HemifacialType1:
    case DeformityKind::HemifacialType2:
      return {Vec3(-0.5, -0.3, 0.8).normalized(), "Gos", 1.0};
  }
  throw InputError("unknown deformity kind");
}

constexpr std::array<DeformityKind, 4> kAllKinds{
    DeformityKind::HorizontalCondylarHyperplasia,
    DeformityKind::VerticalCondylarHyperplasia,
    DeformityKind::HemifacialType1,
    DeformityKind::HemifacialType2,
};

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void check_side(Side side) {
  if (side == Side::Midline) throw InputError("deformity side must be left or right");
}

}  // namespace

std::string_view to_string(DeformityKind kind) {
  switch (kind) {
    case DeformityKind::HorizontalCondylarHyperplasia:
      return "horizontal_condylar_hyperplasia";
    case DeformityKind::VerticalCondylarHyperplasia:
      return "vertical_condylar_hyperplasia";
    case DeformityKind::HemifacialType1:
      return "hemifacial_type1";
    case DeformityKind::HemifacialType2:
      return "hemifacial_type2";
  }
  return "unknown";
}

std::optional<DeformityKind> parse_deformity_kind(std::string_view text) {
  for (auto kind : kAllKinds) {
    if (text == to_string(kind)) return kind;
  }
  if (text == "hch") return DeformityKind::HorizontalCondylarHyperplasia;
  if (text == "vch") return DeformityKind::VerticalCondylarHyperplasia;
  if (text == "type1") return DeformityKind::HemifacialType1;
  if (text == "type2") return DeformityKind::HemifacialType2;
  return std::nullopt;
}

std::span<const DeformityKind> all_deformity_kinds() { return kAllKinds; }

double default_magnitude(DeformityKind kind) {
  return kind == DeformityKind::HemifacialType2 ? 12.0 : 6.0;
}

std::vector<std::string> default_affected(DeformityKind kind) {
  std::vector<std::string> names{"Co", "SIG", "Cr", "Gos", "Goi", "L6"};
  if (kind == DeformityKind::HemifacialType1) names.push_back("Po");
  if (kind == DeformityKind::HemifacialType2) names.insert(names.end(), {"Po", "U6", "J"});
  names.insert(names.end(), {"L1", "Pg", "Gn", "Me"});
  return names;
}

DeformitySpec default_deformity(DeformityKind kind, Side side) {
  check_side(side);
  return {kind, side, default_magnitude(kind), default_affected(kind)};
}

bool meets_criteria(const ValidationMetrics& m, const ClinicalCriteria& criteria) {
  return m.theta < criteria.max_theta_deg && m.dist_n < criteria.max_dist_n && m.dist_u1 < criteria.max_dist_u1 &&
         m.dist_pg < criteria.max_dist_pg;
}

LandmarkSet nominal_landmarks() {
  LandmarkSet set;
  for (const auto& p : kNominalUnpaired) set.unpaired.push_back({std::string(p.name), Vec3(p.x, p.y, p.z)});
  for (const auto& p : kNominalPaired) {
    set.pairs.push_back({std::string(p.name), Vec3(p.x, p.y, p.z), Vec3(-p.x, p.y, p.z)});
  }
  return set;
}

LandmarkSet random_symmetric_base(std::uint64_t seed, double jitter) {
  if (!(jitter >= 0.0)) throw InputError("jitter must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> offset(-jitter, jitter);
  auto draw = [&] {
    const double x = offset(rng);
    const double y = offset(rng);
    const double z = offset(rng);
    return Vec3(x, y, z);
  };

  LandmarkSet set = nominal_landmarks();
  for (auto& l : set.unpaired) {
    l.position += draw();
    l.position.x() = 0.0;
  }
  for (auto& p : set.pairs) {
    p.right += draw();
    p.right.x() = std::max(std::abs(p.right.x()), kMinLateral);
    p.left = Vec3(-p.right.x(), p.right.y(), p.right.z());
  }
  return set;
}

LandmarkSet symmetrize(const LandmarkSet& set, const Plane& plane) {
  LandmarkSet out = set;
  for (auto& l : out.unpaired) l.position = project_point(l.position, plane);
  for (auto& p : out.pairs) p.left = reflect_point(p.right, plane);
  return out;
}

std::vector<PointId> affected_points(const LandmarkSet& set, const DeformitySpec& spec) {
  check_side(spec.side);
  std::vector<PointId> out;
  for (const auto& name : spec.affected) {
    if (set.find_unpaired(name)) {
      out.push_back({name, Side::Midline});
    } else if (set.find_pair(name)) {
      out.push_back({name, spec.side});
    } else {
      throw InputError("affected landmark '" + name + "' is not in the set");
    }
  }
  return out;
}

std::vector<PointId> unaffected_points(const LandmarkSet& set, const DeformitySpec& spec) {
  const auto affected = affected_points(set, spec);
  std::vector<PointId> out;
  for (const auto& id : set.point_ids()) {
    if (std::find(affected.begin(), affected.end(), id) == affected.end()) out.push_back(id);
  }
  return out;
}

LandmarkSet apply_deformity(const LandmarkSet& set, const DeformitySpec& spec) {
  if (!std::isfinite(spec.magnitude) || spec.magnitude < 0.0) throw InputError("deformity magnitude must be >= 0");
  const auto affected = affected_points(set, spec);

  const MorphField field = morph_field(spec.kind);
  const double lateral_sign = spec.side == Side::Right ? 1.0 : -1.0;
  const Vec3 axis(lateral_sign * field.axis.x(), field.axis.y(), field.axis.z());
  const Vec3 chin_shift = spec.magnitude * field.chin_lateral * lateral_sign * Vec3::UnitX();

  LandmarkSet out = set;
  auto member = [&](LandmarkPair& p) -> Vec3& { return spec.side == Side::Right ? p.right : p.left; };

  std::vector<LandmarkPair*> morphed_pairs;
  for (const auto& id : affected) {
    if (id.side == Side::Midline) {
      for (auto& l : out.unpaired) {
        if (l.name == id.name) l.position += chin_shift;
      }
    } else {
      for (auto& p : out.pairs) {
        if (p.name == id.name) morphed_pairs.push_back(&p);
      }
    }
  }
  if (morphed_pairs.empty()) return out;

  Vec3 core = member(*morphed_pairs.front());
  for (auto* p : morphed_pairs) {
    if (p->name == field.core) core = member(*p);
  }
  double reach = 0.0;
  for (auto* p : morphed_pairs) reach = std::max(reach, (member(*p) - core).norm());
  reach *= kTaperReach;

  // Factors are computed on the undeformed positions before any point moves.
  std::vector<double> factors;
  for (auto* p : morphed_pairs) {
    factors.push_back(reach > 0.0 ? 1.0 - (member(*p) - core).norm() / reach : 1.0);
  }
  for (std::size_t i = 0; i < morphed_pairs.size(); ++i) {
    member(*morphed_pairs[i]) += spec.magnitude * factors[i] * axis;
  }
  return out;
}

LandmarkSet add_fluctuating_noise(const LandmarkSet& set, std::span<const PointId> points, double sd,
                                  std::uint64_t seed) {
  if (!std::isfinite(sd) || sd < 0.0) throw InputError("noise standard deviation must be >= 0");
  LandmarkSet out = set;
  if (sd == 0.0) return out;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sd);
  auto listed = [&](const PointId& id) { return std::find(points.begin(), points.end(), id) != points.end(); };
  auto jitter = [&](Vec3& p) {
    const double x = gauss(rng);
    const double y = gauss(rng);
    const double z = gauss(rng);
    p += Vec3(x, y, z);
  };

  // Draw in catalog order so the result does not depend on list order.
  for (auto& l : out.unpaired) {
    if (listed({l.name, Side::Midline})) jitter(l.position);
  }
  for (auto& p : out.pairs) {
    if (listed({p.name, Side::Right})) jitter(p.right);
    if (listed({p.name, Side::Left})) jitter(p.left);
  }
  return out;
}

DeformityCase make_case(const LandmarkSet& symmetric_set, const Plane& plane, const DeformitySpec& spec,
                        double noise_sd, std::uint64_t noise_seed) {
  DeformityCase c;
  c.ground_truth_set = symmetric_set;
  c.ground_truth_plane = plane;
  c.spec = spec;
  c.noise_seed = noise_seed;
  c.noise_sd = noise_sd;
  const auto quiet = unaffected_points(symmetric_set, spec);
  c.deformed_set = add_fluctuating_noise(apply_deformity(symmetric_set, spec), quiet, noise_sd, noise_seed);
  return c;
}

ValidationMetrics outcome_metrics(const Plane& fitted, const Plane& ground_truth,
                                  const LandmarkSet& symmetric_reference, const ClinicalCriteria& criteria) {
  auto distance_of = [&](std::string_view name) {
    const auto* l = symmetric_reference.find_unpaired(std::string(name));
    if (l == nullptr) throw InputError("reference landmark '" + std::string(name) + "' is missing");
    return point_plane_distance(l->position, fitted);
  };
  ValidationMetrics m;
  m.theta = plane_angle(ground_truth, fitted);
  m.dist_n = distance_of(catalog::kNasion);
  m.dist_u1 = distance_of(catalog::kUpperDentalMidline);
  m.dist_pg = distance_of(catalog::kPogonion);
  m.pass = meets_criteria(m, criteria);
  return m;
}

ValidationMetrics outcome_metrics(const Plane& fitted, const DeformityCase& c, const ClinicalCriteria& criteria) {
  return outcome_metrics(fitted, c.ground_truth_plane, c.ground_truth_set, criteria);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

bool BenchmarkReport::all_pass() const {
  return !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const BenchmarkRow& r) {
    return r.error.empty() && r.metrics && r.metrics->pass;
  });
}

std::vector<DeformityCase> generate_cases(const BenchmarkConfig& config) {
  if (config.n_subjects == 0) throw InputError("n_subjects must be at least 1");
  std::vector<DeformitySpec> templates = config.templates;
  if (templates.empty()) {
    for (auto kind : kAllKinds) templates.push_back(default_deformity(kind));
  }

  std::vector<DeformityCase> cases;
  cases.reserve(config.n_subjects * templates.size());
  const Plane midline;  // x = 0
  for (std::size_t s = 0; s < config.n_subjects; ++s) {
    const LandmarkSet base = random_symmetric_base(derive_seed(config.seed, s));
    for (std::size_t k = 0; k < templates.size(); ++k) {
      const std::uint64_t noise_seed = derive_seed(config.seed, 1'000'000 + s * templates.size() + k);
      cases.push_back(make_case(base, midline, templates[k], config.noise_sd, noise_seed));
    }
  }
  return cases;
}

BenchmarkRow evaluate_case(const DeformityCase& c, const PipelineOptions& options, const ClinicalCriteria& criteria) {
  BenchmarkRow row;
  row.spec = c.spec;
  row.noise_seed = c.noise_seed;
  try {
    const PipelineResult result = lager_pipeline(c.deformed_set, options);
    row.mean_t = result.mean_t;
    row.severity = result.severity;
    row.dropped = result.dropped_outliers.size();
    row.warnings = result.warnings;
    row.metrics = outcome_metrics(result.plane, c, criteria);

    PipelineOptions keep_all = options;
    keep_all.drop_outliers = false;
    row.no_drop_metrics = outcome_metrics(lager_pipeline(c.deformed_set, keep_all).plane, c, criteria);
  } catch (const Error& e) {
    row.error = e.what();
  }
  return row;
}

BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
  const auto cases = generate_cases(config);
  const std::size_t per_subject = cases.size() / config.n_subjects;
  BenchmarkReport report;
  report.rows.reserve(cases.size());
  for (std::size_t i = 0; i < cases.size(); ++i) {
    BenchmarkRow row = evaluate_case(cases[i], config.pipeline, config.criteria);
    row.subject = i / per_subject + 1;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace lager::synth
