#include "lager/plane_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace lager {
namespace {

// Ratios ||x cross n|| / ||x|| at or above this make the arcsine derivative
// unusable.
constexpr double kSingularRatio = 1.0 - 1e-12;
constexpr double kRatioClamp = 1.0 - 1e-15;
// Decreases this close to the rounding unit of the objective are not
// progress any more.
constexpr double kResolution = 8.0 * std::numeric_limits<double>::epsilon();
// A failed line search with a tangent gradient below this (relative to the
// objective) is a floating-point floor, not a failure.
constexpr double kStationaryGradient = 1e-6;
// Largest |slope| at an accepted step, relative to the slope at the start,
// when the objective cannot rank steps.
constexpr double kSlopeRatio = 0.5;

double weight_or_one(const std::map<std::string, double>& weights, const std::string& name) {
  auto it = weights.find(name);
  return it == weights.end() ? 1.0 : it->second;
}

void check_weights(const std::map<std::string, double>& weights, const char* family) {
  for (const auto& [name, w] : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw InputError(std::string(family) + " weight for '" + name + "' must be finite and >= 0");
    }
  }
}

// Sine of the angle between the pair direction and the normal line.
double sine_ratio(const Vec3& direction, const Vec3& normal) {
  return direction.cross(normal).norm() / (direction.norm() * normal.norm());
}

// asin(s) / s, continuous at 0.
double asin_over_s(double s) {
  if (s < 1e-4) {
    const double s2 = s * s;
    return 1.0 + s2 / 6.0 + 3.0 * s2 * s2 / 40.0;
  }
  return std::asin(s) / s;
}

Mat3 cross_matrix(const Vec3& y) {
  Mat3 k;
  k << 0.0, -y.z(), y.y(),
       y.z(), 0.0, -y.x(),
       -y.y(), y.x(), 0.0;
  return k;
}

double point_weight_sum(const FitProblem& problem) {
  double sum = 0.0;
  for (double w : problem.point_weights) sum += w;
  return sum;
}

}  // namespace

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::GradientTolerance:
      return "gradient_tolerance";
    case StopReason::ObjectiveResolution:
      return "objective_resolution";
    case StopReason::LineSearchFailed:
      return "line_search_failed";
    case StopReason::IterationLimit:
      return "iteration_limit";
  }
  return "unknown";
}

FitProblem build_problem(const LandmarkSet& set, const FitConfig& config, std::span<const DroppableUnit> outliers) {
  validate_landmark_set(set);
  if (!std::isfinite(config.gamma) || config.gamma < 0.0) throw InputError("gamma must be finite and >= 0");
  check_weights(config.unpaired_weights, "unpaired");
  check_weights(config.midpoint_weights, "midpoint");
  check_weights(config.angle_weights, "angle");

  std::set<std::string> dropped_unpaired;
  std::set<std::string> dropped_pairs;
  for (const auto& unit : outliers) {
    const bool known = unit.kind == DroppableUnit::Kind::Unpaired ? set.find_unpaired(unit.name) != nullptr
                                                                  : set.find_pair(unit.name) != nullptr;
    if (!known) throw InputError("outlier '" + unit.name + "' is not part of the landmark set");
    (unit.kind == DroppableUnit::Kind::Unpaired ? dropped_unpaired : dropped_pairs).insert(unit.name);
  }

  FitProblem problem;
  for (const auto& l : set.unpaired) {
    problem.points.push_back(l.position);
    problem.point_weights.push_back(dropped_unpaired.count(l.name) ? 0.0 : weight_or_one(config.unpaired_weights, l.name));
    problem.point_labels.push_back(l.name);
  }
  for (const auto& p : set.pairs) {
    const Vec3 direction = p.right - p.left;
    if (direction.norm() < kCoincidenceTolerance) throw InputError("coincident pair '" + p.name + "'");
    const bool dropped = dropped_pairs.count(p.name) > 0;
    problem.points.push_back(0.5 * (p.right + p.left));
    problem.point_weights.push_back(dropped ? 0.0 : weight_or_one(config.midpoint_weights, p.name));
    problem.point_labels.push_back(p.name);
    problem.directions.push_back(direction);
    problem.direction_weights.push_back(dropped ? 0.0 : weight_or_one(config.angle_weights, p.name));
    problem.direction_labels.push_back(p.name);
  }

  const auto active_points = std::count_if(problem.point_weights.begin(), problem.point_weights.end(),
                                           [](double w) { return w > 0.0; });
  const auto active_directions = std::count_if(problem.direction_weights.begin(), problem.direction_weights.end(),
                                               [](double w) { return w > 0.0; });
  if (active_points == 0) {
    problem.warnings.push_back("every point weight is zero; the plane offset is undetermined");
  } else if (active_points < 3) {
    problem.warnings.push_back("fewer than 3 weighted points; the initial plane is rank deficient");
  }
  if (config.gamma > 0.0 && active_directions == 0) {
    problem.warnings.push_back("every angle weight is zero; only the point term constrains the plane");
  }
  return problem;
}

double objective(const Vec3& normal, double offset, const FitProblem& problem, double gamma) {
  double point_term = 0.0;
  for (std::size_t i = 0; i < problem.points.size(); ++i) {
    const double r = problem.points[i].dot(normal) + offset;
    point_term += problem.point_weights[i] * r * r;
  }
  point_term /= static_cast<double>(problem.points.size());

  double angle_term = 0.0;
  if (gamma != 0.0 && !problem.directions.empty()) {
    for (std::size_t i = 0; i < problem.directions.size(); ++i) {
      const double s = std::clamp(sine_ratio(problem.directions[i], normal), 0.0, kRatioClamp);
      const double angle = std::asin(s);
      angle_term += problem.direction_weights[i] * angle * angle;
    }
    angle_term *= gamma / static_cast<double>(problem.directions.size());
  }
  return point_term + angle_term;
}

double objective(const Plane& plane, const FitProblem& problem, double gamma) {
  return objective(plane.normal(), plane.offset(), problem, gamma);
}

ObjectiveGradient objective_gradient(const Vec3& normal, double offset, const FitProblem& problem, double gamma) {
  ObjectiveGradient g;
  const double point_scale = 2.0 / static_cast<double>(problem.points.size());
  for (std::size_t i = 0; i < problem.points.size(); ++i) {
    const double wr = problem.point_weights[i] * (problem.points[i].dot(normal) + offset);
    g.normal += point_scale * wr * problem.points[i];
    g.offset += point_scale * wr;
  }

  if (gamma != 0.0 && !problem.directions.empty()) {
    const double angle_scale = 2.0 * gamma / static_cast<double>(problem.directions.size());
    for (std::size_t i = 0; i < problem.directions.size(); ++i) {
      const double p = problem.direction_weights[i];
      if (p == 0.0) continue;
      const Vec3& x = problem.directions[i];
      const double s = sine_ratio(x, normal);
      if (s >= kSingularRatio) {
        throw NumericalError("pair direction '" + problem.direction_labels[i] +
                             "' lies in the plane; the angle term is not differentiable");
      }
      // With c = x.n / (|x||n|): d(asin(s)^2)/dn = -2 sign(c) (asin(s)/s) (x/|x| - c n/|n|) / |n|
      const double length = normal.norm();
      const Vec3 unit_x = x / x.norm();
      const double c = unit_x.dot(normal) / length;
      const Vec3 along = unit_x - c * normal / length;
      g.normal -= angle_scale * p * std::copysign(1.0, c) * asin_over_s(s) / length * along;
    }
  }
  return g;
}

double optimal_offset(const Vec3& normal, const FitProblem& problem) {
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < problem.points.size(); ++i) {
    weighted += problem.point_weights[i] * problem.points[i].dot(normal);
    total += problem.point_weights[i];
  }
  if (total <= 0.0) throw NumericalError("sum of point weights is zero; the plane offset is undetermined");
  return -weighted / total;
}

QuadraticSystem build_b_matrix(const FitProblem& problem, double gamma) {
  const double total = point_weight_sum(problem);
  if (!(total > 0.0)) throw NumericalError("sum of point weights must be positive");

  Mat3 second_moment = Mat3::Zero();
  Vec3 first_moment = Vec3::Zero();
  for (std::size_t i = 0; i < problem.points.size(); ++i) {
    const double w = problem.point_weights[i];
    second_moment += w * problem.points[i] * problem.points[i].transpose();
    first_moment += w * problem.points[i];
  }
  // sum_x sum_z w_x w_z x z^T = (sum w x)(sum w z)^T
  QuadraticSystem system;
  system.b_matrix = (second_moment - first_moment * first_moment.transpose() / total) /
                    static_cast<double>(problem.points.size());

  if (gamma != 0.0 && !problem.directions.empty()) {
    Mat3 angle_block = Mat3::Zero();
    for (std::size_t i = 0; i < problem.directions.size(); ++i) {
      const Vec3& y = problem.directions[i];
      const Mat3 k = cross_matrix(y);
      angle_block += problem.direction_weights[i] * (k.transpose() * k) / y.squaredNorm();
    }
    system.b_matrix += gamma / static_cast<double>(problem.directions.size()) * angle_block;
  }
  if (!system.b_matrix.allFinite()) throw NumericalError("B matrix has non-finite entries");

  system.b_matrix = 0.5 * (system.b_matrix + system.b_matrix.transpose()).eval();
  system.eigen = symmetric_eigen(system.b_matrix);
  return system;
}

Plane solve_quadratic(const FitProblem& problem, double gamma) {
  const QuadraticSystem system = build_b_matrix(problem, gamma);
  const Vec3& lambda = system.eigen.values;
  const double spread = lambda[2] - lambda[0];
  const double gap = lambda[1] - lambda[0];
  const double scale = std::max({std::abs(lambda[0]), std::abs(lambda[2]), std::numeric_limits<double>::min()});
  if (!(spread > 1e-12 * scale) || gap < 1e-9 * spread) {
    throw NumericalError("degenerate landmark configuration: smallest eigenvalue of B is not simple");
  }
  const Vec3 normal = system.eigen.vectors.col(0);
  return canonicalize_plane(normal, optimal_offset(normal, problem));
}

FitResult fit_plane(const FitProblem& problem, const FitConfig& config) {
  FitResult result;
  result.initial_plane = solve_quadratic(problem, 0.0);

  Vec3 n = result.initial_plane.normal();
  double d = result.initial_plane.offset();
  double f = objective(n, d, problem, config.gamma);

  FitDiagnostics& diag = result.diagnostics;
  diag.initial_objective = f;
  diag.objective_history.push_back(f);

  auto tangent_gradient = [&](const Vec3& normal, double offset) {
    // Only the component tangent to the unit sphere moves the normal. The
    // offset derivative vanishes because the offset is always optimal.
    const ObjectiveGradient g = objective_gradient(normal, offset, problem, config.gamma);
    return Vec3(g.normal - g.normal.dot(normal) * normal);
  };

  const BacktrackingRule& rule = config.step_rule;
  Vec3 tangent = tangent_gradient(n, d);
  while (true) {
    diag.gradient_norm = tangent.norm();
    if (diag.gradient_norm <= config.gradient_tolerance) {
      diag.stop_reason = StopReason::GradientTolerance;
      break;
    }
    if (diag.iterations >= config.max_iterations) {
      diag.stop_reason = StopReason::IterationLimit;
      break;
    }

    const double slope = tangent.squaredNorm();
    const double flat = kResolution * std::abs(f);
    bool accepted = false;
    for (double step = rule.initial_step; step >= rule.min_step; step *= rule.shrink) {
      const Vec3 trial_n = (n - step * tangent).normalized();
      const double trial_d = optimal_offset(trial_n, problem);
      const double trial_f = objective(trial_n, trial_d, problem, config.gamma);
      const double required = rule.sufficient_decrease * step * slope;
      Vec3 trial_tangent;
      if (required > flat) {
        if (trial_f > f - required) continue;
        trial_tangent = tangent_gradient(trial_n, trial_d);
      } else {
        // The required decrease is below the rounding of f, so the Armijo
        // test would pass on ties. Fall back on the slope along the search
        // direction, which brackets the one-dimensional minimum instead.
        if (trial_f > f + flat) continue;
        trial_tangent = tangent_gradient(trial_n, trial_d);
        if (std::abs(trial_tangent.dot(tangent)) > kSlopeRatio * slope) continue;
      }
      n = trial_n;
      d = trial_d;
      f = trial_f;
      tangent = trial_tangent;
      accepted = true;
      break;
    }
    if (!accepted) {
      diag.stop_reason = diag.gradient_norm <= kStationaryGradient * std::max(1.0, std::abs(f))
                             ? StopReason::ObjectiveResolution
                             : StopReason::LineSearchFailed;
      break;
    }
    ++diag.iterations;
    diag.objective_history.push_back(f);
  }
  diag.converged = diag.stop_reason == StopReason::GradientTolerance ||
                   diag.stop_reason == StopReason::ObjectiveResolution;

  diag.final_objective = f;
  result.plane = canonicalize_plane(n, d);
  return result;
}

}  // namespace lager
