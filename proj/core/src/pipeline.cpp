#include "lager/pipeline.hpp"

namespace lager {

PipelineResult lager_pipeline(const LandmarkSet& set, const PipelineOptions& options) {
  validate_landmark_set(set);

  PipelineResult result;
  result.trace = rank_landmarks(set, options.min_points);
  result.mean_t = result.trace.stage_tscores.front().mean();
  result.severity = classify_mean_t(result.mean_t, options.selection.severity);

  if (options.drop_outliers) {
    result.selection = select_system(result.trace, options.selection);
    result.dropped_outliers = result.selection->dropped_outliers;
    if (result.selection->warning) result.warnings.push_back(*result.selection->warning);
  }

  const FitProblem problem = build_problem(set, options.fit, result.dropped_outliers);
  result.warnings.insert(result.warnings.end(), problem.warnings.begin(), problem.warnings.end());
  result.fit = fit_plane(problem, options.fit);
  result.plane = result.fit.plane;
  return result;
}

}  // namespace lager
