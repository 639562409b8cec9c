#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lager/edma.hpp"
#include "lager/geometry.hpp"
#include "lager/symmetric_eigen.hpp"

namespace lager {

struct BacktrackingRule {
  double initial_step = 1.0;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  double min_step = 1e-30;
};

// Landmarks absent from a weight map get weight 1.
struct FitConfig {
  double gamma = 480.0;
  std::map<std::string, double> unpaired_weights;  // w_x for midline landmarks
  std::map<std::string, double> midpoint_weights;  // w_x for pair midpoints
  std::map<std::string, double> angle_weights;     // p_x for pair directions
  std::size_t max_iterations = 10000;
  double gradient_tolerance = 1e-10;
  BacktrackingRule step_rule;
};

// Point term: every midline landmark followed by every pair midpoint.
// Angle term: right-minus-left direction of every pair.
struct FitProblem {
  std::vector<Vec3> points;
  std::vector<double> point_weights;
  std::vector<std::string> point_labels;
  std::vector<Vec3> directions;
  std::vector<double> direction_weights;
  std::vector<std::string> direction_labels;
  std::vector<std::string> warnings;
};

// Outliers get weight 0 in both terms. Throws InputError for a pair whose
// two members coincide, a negative weight, or an invalid gamma.
FitProblem build_problem(const LandmarkSet& set, const FitConfig& config,
                         std::span<const DroppableUnit> outliers = {});

struct ObjectiveGradient {
  Vec3 normal = Vec3::Zero();
  double offset = 0.0;
};

// Weighted mean squared point-plane distance plus gamma times the weighted
// mean squared angle (radians) between each pair direction and the normal.
// The point term uses `normal` as given; the angle term depends only on its
// direction.
double objective(const Vec3& normal, double offset, const FitProblem& problem, double gamma);
double objective(const Plane& plane, const FitProblem& problem, double gamma);

// Analytic partial derivatives of objective() with respect to the raw normal
// and the offset. Throws NumericalError when a weighted pair direction lies
// in the plane, where the arcsine derivative is unbounded.
ObjectiveGradient objective_gradient(const Vec3& normal, double offset, const FitProblem& problem, double gamma);

// Offset minimizing the point term for a fixed normal.
double optimal_offset(const Vec3& normal, const FitProblem& problem);

struct QuadraticSystem {
  Mat3 b_matrix = Mat3::Zero();
  SymmetricEigen3 eigen;
};

// Matrix of the small-angle quadratic form n^T B n obtained after
// eliminating the offset.
QuadraticSystem build_b_matrix(const FitProblem& problem, double gamma);

// Minimizer of the small-angle problem: eigenvector of the smallest
// eigenvalue of B plus the optimal offset. Throws NumericalError when that
// eigenvalue is not simple.
Plane solve_quadratic(const FitProblem& problem, double gamma);

enum class StopReason {
  GradientTolerance,    // tangent gradient at or below gradient_tolerance
  ObjectiveResolution,  // no step lowers the objective or the gradient; gradient negligible
  LineSearchFailed,     // as above but with a gradient that is not negligible
  IterationLimit,
};

std::string_view to_string(StopReason reason);

struct FitDiagnostics {
  std::size_t iterations = 0;
  double initial_objective = 0.0;  // at the gamma = 0 initialization
  double final_objective = 0.0;
  double gradient_norm = 0.0;  // tangent-space gradient at the result
  bool converged = false;  // stopped by GradientTolerance or ObjectiveResolution
  StopReason stop_reason = StopReason::IterationLimit;
  std::vector<double> objective_history;  // one value per accepted iterate
};

struct FitResult {
  Plane plane;
  Plane initial_plane;
  FitDiagnostics diagnostics;
};

// Projected gradient descent on the full objective, started from the
// gamma = 0 closed-form plane. The offset is kept at its optimum for the
// current normal, so every iterate is feasible and the objective never
// increases.
FitResult fit_plane(const FitProblem& problem, const FitConfig& config);

}  // namespace lager
