#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "lager/geometry.hpp"

namespace lager {

// The unit removed by one elimination step: a midline landmark, or a whole
// pair (both sides go together).
struct DroppableUnit {
  enum class Kind { Unpaired, Pair };
  Kind kind = Kind::Unpaired;
  std::string name;

  std::size_t point_count() const { return kind == Kind::Pair ? 2 : 1; }
  friend bool operator==(const DroppableUnit&, const DroppableUnit&) = default;
};

// Which landmark indices produced one entry of the distance vectors.
// UnpairedToPair: first = unpaired index, second = pair index.
// PairToPair:     first < second, both pair indices.
struct DistanceEntry {
  enum class Kind { UnpairedToPair, PairToPair };
  Kind kind = Kind::UnpairedToPair;
  std::size_t first = 0;
  std::size_t second = 0;

  bool involves(const DroppableUnit::Kind unit_kind, std::size_t index) const;
  friend bool operator==(const DistanceEntry&, const DistanceEntry&) = default;
};

// Right-side and left-side inter-landmark distances with a shared ordering:
// all unpaired-to-pair distances (row-major over unpaired, then pair), then
// the upper-triangular pair-to-pair distances.
struct DistanceVectors {
  std::vector<double> right;
  std::vector<double> left;
  std::vector<DistanceEntry> entries;
};

// |log(right / left)| per entry.
struct RatioVector {
  std::vector<double> entries;
  std::vector<DistanceEntry> index_map;

  double mean() const;
};

struct UnitScore {
  DroppableUnit unit;
  double t = 0.0;  // mean of the ratio vector with `unit` removed
  friend bool operator==(const UnitScore&, const UnitScore&) = default;
};

// Leave-one-unit-out scores, in catalog order (unpaired, then pairs).
struct TScores {
  std::vector<UnitScore> scores;

  std::vector<double> values() const;
  double mean() const;
  const UnitScore* find(std::string_view name) const;
};

struct AsymmetryTrace {
  std::vector<DroppableUnit> elimination_order;  // most asymmetric first
  std::vector<LandmarkSet> stage_systems;        // after 0, 1, 2, ... removals
  std::vector<TScores> stage_tscores;            // one per stage system
};

enum class Severity { Normal, MildModerate, Severe };

std::string_view to_string(Severity severity);

inline constexpr std::size_t kDefaultMinPoints = 8;

// Scores within this absolute distance of the minimum are ties, resolved by
// catalog order.
inline constexpr double kTieTolerance = 1e-12;

// Mean first-iteration T below `mild` is normal, below `severe` is
// mild/moderate, otherwise severe.
struct SeverityThresholds {
  double mild = 0.02;
  double severe = 0.04;
};

std::size_t distance_vector_length(std::size_t unpaired, std::size_t pairs);

DistanceVectors distance_vectors(const LandmarkSet& set);
RatioVector ratio_vector(const LandmarkSet& set);

// Every unit of `set` in catalog order, droppable or not.
std::vector<DroppableUnit> units_of(const LandmarkSet& set);
LandmarkSet remove_unit(const LandmarkSet& set, const DroppableUnit& unit);

// A unit has a score only if the set without it keeps at least one pair and
// a non-empty ratio vector. Throws InputError when no unit qualifies.
TScores t_scores(const LandmarkSet& set);

// Recursively removes the lowest-scoring unit, recording every stage. Stops
// once the next removal would leave fewer than `min_points` individual
// points, or no unit of the next system could be scored.
AsymmetryTrace rank_landmarks(const LandmarkSet& set, std::size_t min_points = kDefaultMinPoints);

Severity classify_mean_t(double mean_t, const SeverityThresholds& thresholds = {});
Severity classify_severity(const LandmarkSet& set, const SeverityThresholds& thresholds = {});

}  // namespace lager
