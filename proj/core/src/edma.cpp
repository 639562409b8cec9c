#include "lager/edma.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lager {

bool DistanceEntry::involves(const DroppableUnit::Kind unit_kind, std::size_t index) const {
  if (unit_kind == DroppableUnit::Kind::Unpaired) {
    return kind == Kind::UnpairedToPair && first == index;
  }
  if (kind == Kind::UnpairedToPair) return second == index;
  return first == index || second == index;
}

double RatioVector::mean() const {
  if (entries.empty()) return 0.0;
  return std::accumulate(entries.begin(), entries.end(), 0.0) / static_cast<double>(entries.size());
}

std::vector<double> TScores::values() const {
  std::vector<double> out;
  out.reserve(scores.size());
  for (const auto& s : scores) out.push_back(s.t);
  return out;
}

double TScores::mean() const {
  if (scores.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : scores) sum += s.t;
  return sum / static_cast<double>(scores.size());
}

const UnitScore* TScores::find(std::string_view name) const {
  auto it = std::find_if(scores.begin(), scores.end(), [&](const UnitScore& s) { return s.unit.name == name; });
  return it == scores.end() ? nullptr : &*it;
}

std::string_view to_string(Severity severity) {
  switch (severity) {
    case Severity::Normal:
      return "normal";
    case Severity::MildModerate:
      return "mild_moderate";
    case Severity::Severe:
      return "severe";
  }
  return "unknown";
}

std::size_t distance_vector_length(std::size_t unpaired, std::size_t pairs) {
  return pairs * (pairs == 0 ? 0 : pairs - 1) / 2 + unpaired * pairs;
}

DistanceVectors distance_vectors(const LandmarkSet& set) {
  validate_landmark_set(set);
  const std::size_t m = set.unpaired_count();
  const std::size_t n = set.pair_count();

  DistanceVectors out;
  const std::size_t len = distance_vector_length(m, n);
  out.right.reserve(len);
  out.left.reserve(len);
  out.entries.reserve(len);

  auto push = [&](double r, double l, DistanceEntry e) {
    if (r < kCoincidenceTolerance || l < kCoincidenceTolerance) {
      throw NumericalError("degenerate distance between landmarks");
    }
    out.right.push_back(r);
    out.left.push_back(l);
    out.entries.push_back(e);
  };

  for (std::size_t i = 0; i < m; ++i) {
    const Vec3& u = set.unpaired[i].position;
    for (std::size_t j = 0; j < n; ++j) {
      push((u - set.pairs[j].right).norm(), (u - set.pairs[j].left).norm(),
           {DistanceEntry::Kind::UnpairedToPair, i, j});
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      push((set.pairs[i].right - set.pairs[j].right).norm(), (set.pairs[i].left - set.pairs[j].left).norm(),
           {DistanceEntry::Kind::PairToPair, i, j});
    }
  }
  return out;
}

RatioVector ratio_vector(const LandmarkSet& set) {
  auto dv = distance_vectors(set);
  RatioVector out;
  out.entries.reserve(dv.right.size());
  for (std::size_t k = 0; k < dv.right.size(); ++k) {
    out.entries.push_back(std::abs(std::log(dv.right[k] / dv.left[k])));
  }
  out.index_map = std::move(dv.entries);
  return out;
}

std::vector<DroppableUnit> units_of(const LandmarkSet& set) {
  std::vector<DroppableUnit> units;
  units.reserve(set.unpaired_count() + set.pair_count());
  for (const auto& l : set.unpaired) units.push_back({DroppableUnit::Kind::Unpaired, l.name});
  for (const auto& p : set.pairs) units.push_back({DroppableUnit::Kind::Pair, p.name});
  return units;
}

LandmarkSet remove_unit(const LandmarkSet& set, const DroppableUnit& unit) {
  LandmarkSet out = set;
  if (unit.kind == DroppableUnit::Kind::Unpaired) {
    auto it = std::find_if(out.unpaired.begin(), out.unpaired.end(),
                           [&](const Landmark& l) { return l.name == unit.name; });
    if (it == out.unpaired.end()) throw InputError("no unpaired landmark named '" + unit.name + "'");
    out.unpaired.erase(it);
  } else {
    auto it = std::find_if(out.pairs.begin(), out.pairs.end(),
                           [&](const LandmarkPair& p) { return p.name == unit.name; });
    if (it == out.pairs.end()) throw InputError("no landmark pair named '" + unit.name + "'");
    out.pairs.erase(it);
  }
  return out;
}

TScores t_scores(const LandmarkSet& set) {
  const RatioVector h = ratio_vector(set);
  const std::size_t m = set.unpaired_count();
  const std::size_t n = set.pair_count();

  TScores out;
  const auto units = units_of(set);
  for (std::size_t u = 0; u < units.size(); ++u) {
    const auto kind = units[u].kind;
    const std::size_t index = kind == DroppableUnit::Kind::Unpaired ? u : u - m;
    if (kind == DroppableUnit::Kind::Pair && n < 2) continue;

    // Summing the surviving entries in their original order gives exactly
    // the mean of the ratio vector recomputed on the reduced set.
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < h.entries.size(); ++k) {
      if (h.index_map[k].involves(kind, index)) continue;
      sum += h.entries[k];
      ++count;
    }
    if (count == 0) continue;
    out.scores.push_back({units[u], sum / static_cast<double>(count)});
  }
  if (out.scores.empty()) {
    throw InputError("landmark system too small: removing any unit would leave no usable distances");
  }
  return out;
}

namespace {

std::size_t lowest_score_index(const TScores& scores) {
  double best = scores.scores.front().t;
  for (const auto& s : scores.scores) best = std::min(best, s.t);
  for (std::size_t i = 0; i < scores.scores.size(); ++i) {
    if (scores.scores[i].t <= best + kTieTolerance) return i;
  }
  return 0;
}

}  // namespace

AsymmetryTrace rank_landmarks(const LandmarkSet& set, std::size_t min_points) {
  if (min_points < 4) throw InputError("min_points must be at least 4");

  AsymmetryTrace trace;
  trace.stage_systems.push_back(set);
  trace.stage_tscores.push_back(t_scores(set));

  while (true) {
    const LandmarkSet& current = trace.stage_systems.back();
    const TScores& scores = trace.stage_tscores.back();
    const DroppableUnit unit = scores.scores[lowest_score_index(scores)].unit;
    if (current.point_count() < min_points + unit.point_count()) break;

    LandmarkSet next = remove_unit(current, unit);
    TScores next_scores;
    try {
      next_scores = t_scores(next);
    } catch (const InputError&) {
      break;
    }
    trace.elimination_order.push_back(unit);
    trace.stage_systems.push_back(std::move(next));
    trace.stage_tscores.push_back(std::move(next_scores));
  }
  return trace;
}

Severity classify_mean_t(double mean_t, const SeverityThresholds& thresholds) {
  if (mean_t < thresholds.mild) return Severity::Normal;
  if (mean_t < thresholds.severe) return Severity::MildModerate;
  return Severity::Severe;
}

Severity classify_severity(const LandmarkSet& set, const SeverityThresholds& thresholds) {
  return classify_mean_t(t_scores(set).mean(), thresholds);
}

}  // namespace lager
