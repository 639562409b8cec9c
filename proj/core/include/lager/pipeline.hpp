#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lager/edma.hpp"
#include "lager/plane_fit.hpp"
#include "lager/selection.hpp"

namespace lager {

struct PipelineOptions {
  FitConfig fit;
  SelectionConfig selection;
  std::size_t min_points = kDefaultMinPoints;
  // false skips outlier selection: every landmark keeps weight 1.
  bool drop_outliers = true;
};

struct PipelineResult {
  Plane plane;
  AsymmetryTrace trace;
  std::optional<SelectionResult> selection;  // empty when outliers are not dropped
  std::vector<DroppableUnit> dropped_outliers;
  FitResult fit;
  Severity severity = Severity::Normal;
  double mean_t = 0.0;  // mean of the first-iteration T-scores
  std::vector<std::string> warnings;
};

// Rank landmarks by asymmetry, select the trustworthy subsystem, then fit the
// plane with zero weight on the dropped outliers.
PipelineResult lager_pipeline(const LandmarkSet& set, const PipelineOptions& options = {});

}  // namespace lager
