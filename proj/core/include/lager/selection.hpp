#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lager/edma.hpp"

namespace lager {

struct StageStats {
  std::size_t stage_index = 0;  // number of outliers dropped
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
  double skewness = 0.0;  // adjusted Fisher-Pearson
  friend bool operator==(const StageStats&, const StageStats&) = default;
};

// Mean, sample variance and adjusted Fisher-Pearson skewness. A zero-variance
// sample has skewness 0. Throws InputError for fewer than 3 values.
StageStats distribution_stats(std::span<const double> values);
StageStats distribution_stats(const TScores& scores);

struct SelectionConfig {
  // Stages with variance <= factor * (least variance) are candidates.
  double variance_factor = 1.5;
  // A severe original system whose selected stage still has a variance
  // above this value is flagged as untrustworthy.
  double warning_variance = 1e-6;
  SeverityThresholds severity;
};

struct SelectionResult {
  std::size_t selected_stage = 0;
  std::vector<DroppableUnit> dropped_outliers;
  LandmarkSet kept_set;
  std::vector<StageStats> stage_stats;  // stages with at least 3 scores
  Severity severity = Severity::Normal;  // of the original system
  std::optional<std::string> warning;
};

// Picks, among stages whose T-score variance is within variance_factor of
// the least, the one with the smallest |skewness|; ties go to the stage with
// fewer outliers dropped.
SelectionResult select_system(const AsymmetryTrace& trace, const SelectionConfig& config = {});

}  // namespace lager
