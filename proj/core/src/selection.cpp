#include "lager/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lager {

StageStats distribution_stats(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 3) throw InputError("insufficient scores: at least 3 are needed for skewness");

  const double count = static_cast<double>(n);
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= count;

  double m2 = 0.0;
  double m3 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= count;
  m3 /= count;

  StageStats stats;
  stats.mean = mean;
  stats.variance = m2 * count / (count - 1.0);
  if (m2 > 0.0) {
    const double g1 = m3 / std::pow(m2, 1.5);
    stats.skewness = std::sqrt(count * (count - 1.0)) / (count - 2.0) * g1;
  }
  return stats;
}

StageStats distribution_stats(const TScores& scores) {
  const auto values = scores.values();
  return distribution_stats(values);
}

SelectionResult select_system(const AsymmetryTrace& trace, const SelectionConfig& config) {
  if (trace.stage_systems.empty() || trace.stage_systems.size() != trace.stage_tscores.size()) {
    throw InputError("malformed asymmetry trace");
  }

  SelectionResult result;
  for (std::size_t k = 0; k < trace.stage_tscores.size(); ++k) {
    if (trace.stage_tscores[k].scores.size() < 3) continue;
    StageStats s = distribution_stats(trace.stage_tscores[k]);
    s.stage_index = k;
    result.stage_stats.push_back(s);
  }
  if (result.stage_stats.empty()) throw InputError("no stage has at least 3 T-scores");

  double least_variance = std::numeric_limits<double>::infinity();
  for (const auto& s : result.stage_stats) least_variance = std::min(least_variance, s.variance);
  // Spreads below the ranking tie tolerance are rounding noise: such a
  // stage is flat and its skewness is taken as 0.
  constexpr double kFlatVariance = kTieTolerance * kTieTolerance;
  const double variance_cap = std::max(config.variance_factor * least_variance, kFlatVariance);
  auto effective_skew = [&](const StageStats& s) {
    return s.variance <= kFlatVariance ? 0.0 : std::abs(s.skewness);
  };

  const StageStats* best = nullptr;
  for (const auto& s : result.stage_stats) {
    if (s.variance > variance_cap) continue;
    // Stages are visited in increasing index, so strict < keeps the
    // earliest stage on ties.
    if (best == nullptr || effective_skew(s) < effective_skew(*best)) best = &s;
  }

  const StageStats selected = *best;
  result.selected_stage = selected.stage_index;
  result.dropped_outliers.assign(trace.elimination_order.begin(),
                                 trace.elimination_order.begin() + static_cast<std::ptrdiff_t>(selected.stage_index));
  result.kept_set = trace.stage_systems[selected.stage_index];
  result.severity = classify_mean_t(trace.stage_tscores.front().mean(), config.severity);

  if (result.severity == Severity::Severe && selected.variance > config.warning_variance) {
    std::ostringstream os;
    os << "severe asymmetry affecting most regions: T-score variance " << selected.variance
       << " at the selected stage " << selected.stage_index << " exceeds " << config.warning_variance
       << "; the estimated midsagittal plane may be unreliable";
    result.warning = os.str();
  }
  return result;
}

}  // namespace lager
