#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lager/errors.hpp"

namespace lager {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Two landmark positions closer than this (mm) are treated as coincident.
inline constexpr double kCoincidenceTolerance = 1e-9;

struct Landmark {
  std::string name;
  Vec3 position = Vec3::Zero();  // mm
  friend bool operator==(const Landmark&, const Landmark&) = default;
};

// A bilateral landmark. Both members share one name; `right` and `left`
// are the two sides of the face.
struct LandmarkPair {
  std::string name;
  Vec3 right = Vec3::Zero();
  Vec3 left = Vec3::Zero();
  friend bool operator==(const LandmarkPair&, const LandmarkPair&) = default;
};

enum class Side { Midline, Right, Left };

// Addresses one physical point: an unpaired landmark (Side::Midline) or one
// member of a pair.
struct PointId {
  std::string name;
  Side side = Side::Midline;

  friend bool operator==(const PointId&, const PointId&) = default;
};

std::string to_string(const PointId& id);

// M unpaired (midline) landmarks followed by N left/right pairs. Order is
// significant: it defines the flattening of the distance vectors and the
// tie-break order of the asymmetry ranking.
struct LandmarkSet {
  std::vector<Landmark> unpaired;
  std::vector<LandmarkPair> pairs;

  std::size_t unpaired_count() const { return unpaired.size(); }
  std::size_t pair_count() const { return pairs.size(); }
  // Individual points: a pair counts twice.
  std::size_t point_count() const { return unpaired.size() + 2 * pairs.size(); }

  const Landmark* find_unpaired(const std::string& name) const;
  const LandmarkPair* find_pair(const std::string& name) const;
  bool contains(const std::string& name) const;
  std::optional<Vec3> point(const PointId& id) const;

  // Every point in catalog order: unpaired first, then right/left per pair.
  std::vector<PointId> point_ids() const;

  friend bool operator==(const LandmarkSet&, const LandmarkSet&) = default;
};

// {x : normal . x + offset = 0} with a unit normal whose first
// non-negligible component is positive. Construct through
// canonicalize_plane().
class Plane {
 public:
  Plane() = default;  // x = 0

  const Vec3& normal() const { return normal_; }
  double offset() const { return offset_; }

  double signed_distance(const Vec3& p) const { return normal_.dot(p) + offset_; }

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  Plane(const Vec3& normal, double offset) : normal_(normal), offset_(offset) {}
  friend Plane canonicalize_plane(const Vec3& normal, double offset);

  Vec3 normal_ = Vec3::UnitX();
  double offset_ = 0.0;
};

// Rescales (normal, offset) so the normal has unit length and flips both so
// the sign convention holds. Throws InputError for a zero or non-finite normal.
Plane canonicalize_plane(const Vec3& normal, double offset);

double point_plane_distance(const Vec3& p, const Plane& plane);

// Angle between the two planes in degrees, in [0, 90]. Orientation of the
// normals does not matter.
double plane_angle(const Plane& a, const Plane& b);

Vec3 reflect_point(const Vec3& p, const Plane& plane);
Vec3 project_point(const Vec3& p, const Plane& plane);

struct Violation {
  enum class Kind { DuplicateName, CoincidentPoints, NonFiniteCoordinate, NoPairs };
  Kind kind;
  std::vector<std::string> names;
  std::string message;
};

std::vector<Violation> find_violations(const LandmarkSet& set);

class InvalidLandmarkSet : public InputError {
 public:
  explicit InvalidLandmarkSet(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

// Returns `set` unchanged when every invariant holds, otherwise throws
// InvalidLandmarkSet carrying all violations found.
const LandmarkSet& validate_landmark_set(const LandmarkSet& set);

struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Plane apply(const Plane& plane) const;
  LandmarkSet apply(const LandmarkSet& set) const;
};

}  // namespace lager
