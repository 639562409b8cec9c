#pragma once

#include "lager/geometry.hpp"

namespace lager {

// Eigen-decomposition of a real symmetric 3x3 matrix. Eigenvalues ascend;
// column k of `vectors` is the unit eigenvector for values[k].
struct SymmetricEigen3 {
  Vec3 values = Vec3::Zero();
  Mat3 vectors = Mat3::Identity();
};

// Cyclic Jacobi rotations until the off-diagonal mass is at rounding level.
// Only the upper triangle of `a` is read.
SymmetricEigen3 symmetric_eigen(const Mat3& a);

}  // namespace lager
