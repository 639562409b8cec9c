#include "lager/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace lager {

std::string to_string(const PointId& id) {
  switch (id.side) {
    case Side::Right:
      return id.name + "(R)";
    case Side::Left:
      return id.name + "(L)";
    case Side::Midline:
      break;
  }
  return id.name;
}

const Landmark* LandmarkSet::find_unpaired(const std::string& name) const {
  auto it = std::find_if(unpaired.begin(), unpaired.end(),
                         [&](const Landmark& l) { return l.name == name; });
  return it == unpaired.end() ? nullptr : &*it;
}

const LandmarkPair* LandmarkSet::find_pair(const std::string& name) const {
  auto it = std::find_if(pairs.begin(), pairs.end(),
                         [&](const LandmarkPair& p) { return p.name == name; });
  return it == pairs.end() ? nullptr : &*it;
}

bool LandmarkSet::contains(const std::string& name) const {
  return find_unpaired(name) != nullptr || find_pair(name) != nullptr;
}

std::optional<Vec3> LandmarkSet::point(const PointId& id) const {
  if (id.side == Side::Midline) {
    if (const auto* l = find_unpaired(id.name)) return l->position;
    return std::nullopt;
  }
  if (const auto* p = find_pair(id.name)) return id.side == Side::Right ? p->right : p->left;
  return std::nullopt;
}

std::vector<PointId> LandmarkSet::point_ids() const {
  std::vector<PointId> ids;
  ids.reserve(point_count());
  for (const auto& l : unpaired) ids.push_back({l.name, Side::Midline});
  for (const auto& p : pairs) {
    ids.push_back({p.name, Side::Right});
    ids.push_back({p.name, Side::Left});
  }
  return ids;
}

Plane canonicalize_plane(const Vec3& normal, double offset) {
  const double norm = normal.norm();
  if (!std::isfinite(norm) || !std::isfinite(offset) || norm == 0.0) {
    throw InputError("plane normal must be finite and non-zero");
  }
  // Leaving already-unit normals alone makes canonicalization idempotent bit
  // for bit.
  Vec3 n = normal;
  double d = offset;
  if (std::abs(norm - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) {
    n /= norm;
    d /= norm;
  }
  for (int i = 0; i < 3; ++i) {
    if (std::abs(n[i]) > 1e-9) {
      if (n[i] < 0) {
        n = -n;
        d = -d;
      }
      break;
    }
  }
  // Adding +0.0 turns negative zeros into positive ones.
  return Plane(n.array() + 0.0, d + 0.0);
}

double point_plane_distance(const Vec3& p, const Plane& plane) {
  return std::abs(plane.signed_distance(p));
}

double plane_angle(const Plane& a, const Plane& b) {
  const double c = std::clamp(std::abs(a.normal().dot(b.normal())), 0.0, 1.0);
  // acos loses precision near 1; atan2 of |a x b| and |a . b| does not.
  const double s = a.normal().cross(b.normal()).norm();
  return std::atan2(s, c) * 180.0 / std::numbers::pi;
}

Vec3 reflect_point(const Vec3& p, const Plane& plane) {
  return p - 2.0 * plane.signed_distance(p) * plane.normal();
}

Vec3 project_point(const Vec3& p, const Plane& plane) {
  return p - plane.signed_distance(p) * plane.normal();
}

std::vector<Violation> find_violations(const LandmarkSet& set) {
  std::vector<Violation> out;

  if (set.pairs.empty()) {
    out.push_back({Violation::Kind::NoPairs, {}, "no pairs: at least one left/right pair is required"});
  }

  std::set<std::string> seen;
  auto check_name = [&](const std::string& name) {
    if (!seen.insert(name).second) {
      out.push_back({Violation::Kind::DuplicateName, {name}, "duplicate landmark name '" + name + "'"});
    }
  };
  for (const auto& l : set.unpaired) check_name(l.name);
  for (const auto& p : set.pairs) check_name(p.name);

  const auto ids = set.point_ids();
  // Positions by index, in point_ids() order; names may repeat here.
  std::vector<Vec3> points;
  points.reserve(ids.size());
  for (const auto& l : set.unpaired) points.push_back(l.position);
  for (const auto& p : set.pairs) {
    points.push_back(p.right);
    points.push_back(p.left);
  }

  std::vector<bool> finite(ids.size(), true);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!points[i].allFinite()) {
      finite[i] = false;
      out.push_back({Violation::Kind::NonFiniteCoordinate, {ids[i].name},
                     "non-finite coordinate in landmark '" + to_string(ids[i]) + "'"});
    }
  }

  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!finite[i]) continue;
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      if (!finite[j]) continue;
      if ((points[i] - points[j]).norm() < kCoincidenceTolerance) {
        out.push_back({Violation::Kind::CoincidentPoints, {ids[i].name, ids[j].name},
                       "coincident landmarks '" + to_string(ids[i]) + "' and '" + to_string(ids[j]) + "'"});
      }
    }
  }
  return out;
}

namespace {

std::string join_messages(const std::vector<Violation>& violations) {
  std::ostringstream os;
  os << "invalid landmark set";
  for (const auto& v : violations) os << "; " << v.message;
  return os.str();
}

}  // namespace

InvalidLandmarkSet::InvalidLandmarkSet(std::vector<Violation> violations)
    : InputError(join_messages(violations)), violations_(std::move(violations)) {}

const LandmarkSet& validate_landmark_set(const LandmarkSet& set) {
  auto violations = find_violations(set);
  if (!violations.empty()) throw InvalidLandmarkSet(std::move(violations));
  return set;
}

Plane RigidTransform::apply(const Plane& plane) const {
  // n'.(R x + t) + d' = 0  <=>  n.x + d = 0  with n' = R n, d' = d - n'.t
  const Vec3 n = rotation * plane.normal();
  return canonicalize_plane(n, plane.offset() - n.dot(translation));
}

LandmarkSet RigidTransform::apply(const LandmarkSet& set) const {
  LandmarkSet out = set;
  for (auto& l : out.unpaired) l.position = apply(l.position);
  for (auto& p : out.pairs) {
    p.right = apply(p.right);
    p.left = apply(p.left);
  }
  return out;
}

}  // namespace lager
