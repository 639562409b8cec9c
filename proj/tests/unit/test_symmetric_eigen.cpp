#include <gtest/gtest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "lager/symmetric_eigen.hpp"

using namespace lager;

namespace {

Mat3 random_symmetric(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Mat3 a;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) a(i, j) = a(j, i) = g(rng);
  }
  return a;
}

void expect_valid_decomposition(const Mat3& a, const SymmetricEigen3& e, double tol) {
  const double scale = std::max(1.0, a.norm());
  EXPECT_LE(e.values(0), e.values(1));
  EXPECT_LE(e.values(1), e.values(2));
  EXPECT_LT((e.vectors.transpose() * e.vectors - Mat3::Identity()).norm(), tol);
  const Mat3 rebuilt = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
  EXPECT_LT((rebuilt - a).norm(), tol * scale);
  for (int k = 0; k < 3; ++k) {
    EXPECT_LT((a * e.vectors.col(k) - e.values(k) * e.vectors.col(k)).norm(), tol * scale);
  }
}

}  // namespace

TEST(SymmetricEigen, MatchesReferenceSolver) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 500; ++i) {
    const Mat3 a = random_symmetric(rng, i % 2 ? 1e3 : 1e-2);
    const auto e = symmetric_eigen(a);
    Eigen::SelfAdjointEigenSolver<Mat3> ref(a);
    EXPECT_LT((e.values - ref.eigenvalues()).norm(), 1e-12 * std::max(1.0, a.norm()));
    expect_valid_decomposition(a, e, 1e-12);
  }
}

TEST(SymmetricEigen, DiagonalAndRepeatedEigenvalues) {
  const Mat3 d = Vec3(3, 1, 2).asDiagonal();
  const auto e = symmetric_eigen(d);
  EXPECT_EQ(e.values, Vec3(1, 2, 3));
  expect_valid_decomposition(d, e, 1e-14);

  const auto id = symmetric_eigen(Mat3::Identity() * 4.0);
  EXPECT_EQ(id.values, Vec3(4, 4, 4));
  expect_valid_decomposition(Mat3::Identity() * 4.0, id, 1e-14);

  // Rotated diag(1, 1, 5): a repeated pair in a non-axis basis.
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  const Mat3 q = Eigen::Quaterniond(g(rng), g(rng), g(rng), g(rng)).normalized().toRotationMatrix();
  const Mat3 a = q * Vec3(1, 1, 5).asDiagonal() * q.transpose();
  const auto r = symmetric_eigen(a);
  EXPECT_NEAR(r.values(0), 1.0, 1e-13);
  EXPECT_NEAR(r.values(1), 1.0, 1e-13);
  EXPECT_NEAR(r.values(2), 5.0, 1e-13);
  expect_valid_decomposition(a, r, 1e-13);
}

TEST(SymmetricEigen, ReadsUpperTriangleOnly) {
  std::mt19937_64 rng(3);
  const Mat3 a = random_symmetric(rng);
  Mat3 garbage = a;
  garbage(1, 0) = 99;
  garbage(2, 0) = -7;
  garbage(2, 1) = 1e6;
  const auto e1 = symmetric_eigen(a);
  const auto e2 = symmetric_eigen(garbage);
  EXPECT_EQ(e1.values, e2.values);
}

TEST(SymmetricEigen, ZeroAndRankOne) {
  const auto z = symmetric_eigen(Mat3::Zero());
  EXPECT_EQ(z.values, Vec3::Zero());
  const Vec3 v = Vec3(1, 2, -2) / 3.0;
  const Mat3 a = 9.0 * v * v.transpose();
  const auto e = symmetric_eigen(a);
  EXPECT_NEAR(e.values(2), 9.0, 1e-13);
  EXPECT_NEAR(std::abs(e.vectors.col(2).dot(v)), 1.0, 1e-14);
  expect_valid_decomposition(a, e, 1e-13);
}
