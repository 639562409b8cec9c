#include <gtest/gtest.h>

#include <cmath>

#include "lager/pipeline.hpp"
#include "lager/synth.hpp"
#include "oracles.hpp"

using namespace lager;

namespace {

// Every pair perturbed on the right and every other midline landmark pushed
// sideways: no region of the face is left clean.
LandmarkSet all_regions_asymmetric() {
  auto set = synth::nominal_landmarks();
  for (std::size_t i = 0; i < set.pairs.size(); ++i) {
    const double a = 0.9 * static_cast<double>(i);
    set.pairs[i].right += Vec3(3 * std::cos(a), 6 * std::sin(a), 4 * std::cos(2 * a));
  }
  for (std::size_t k = 0; k < set.unpaired.size(); ++k) set.unpaired[k].position.x() += k % 2 ? 4.0 : -3.0;
  return set;
}

}  // namespace

TEST(Pipeline, RecoversMirrorPlaneOfRotatedSymmetricSets) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto t = fixtures::random_rigid(seed);
    const auto set = t.apply(synth::random_symmetric_base(seed));
    const auto r = lager_pipeline(set);
    EXPECT_LT(plane_angle(r.plane, t.apply(Plane())), 1e-7);
    EXPECT_EQ(r.severity, Severity::Normal);
    EXPECT_NEAR(r.mean_t, 0.0, 1e-12);
    EXPECT_TRUE(r.fit.diagnostics.converged);
  }
}

TEST(Pipeline, DropsDisplacedPair) {
  const auto set = fixtures::displaced_pair(4, "Gos", Vec3(8, -5, 6));
  const auto r = lager_pipeline(set);
  ASSERT_FALSE(r.trace.elimination_order.empty());
  EXPECT_EQ(r.trace.elimination_order.front().name, "Gos");
  ASSERT_FALSE(r.dropped_outliers.empty());
  EXPECT_EQ(r.dropped_outliers.front().name, "Gos");
  // The remaining landmarks are exactly symmetric about x = 0.
  EXPECT_LT(plane_angle(r.plane, Plane()), 1e-7);
}

TEST(Pipeline, NoDropKeepsEveryWeight) {
  const auto set = fixtures::displaced_pair(4, "Gos", Vec3(8, -5, 6));
  PipelineOptions options;
  options.drop_outliers = false;
  const auto r = lager_pipeline(set, options);
  EXPECT_FALSE(r.selection.has_value());
  EXPECT_TRUE(r.dropped_outliers.empty());
  EXPECT_GT(plane_angle(r.plane, Plane()), 0.1);
  // Ranking still runs, so severity is reported either way.
  EXPECT_EQ(r.mean_t, lager_pipeline(set).mean_t);
}

TEST(Pipeline, InvariantUnderRigidMotion) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto spec = synth::default_deformity(synth::all_deformity_kinds()[seed % 4]);
    const auto base = synth::random_symmetric_base(seed);
    const auto set = synth::add_fluctuating_noise(synth::apply_deformity(base, spec), base.point_ids(), 0.5, seed);
    const auto t = fixtures::random_rigid(seed + 50);
    const auto a = lager_pipeline(set);
    const auto b = lager_pipeline(t.apply(set));
    EXPECT_EQ(a.trace.elimination_order, b.trace.elimination_order);
    EXPECT_EQ(a.dropped_outliers, b.dropped_outliers);
    EXPECT_NEAR(a.mean_t, b.mean_t, 1e-12);
    EXPECT_LT(plane_angle(t.apply(a.plane), b.plane), 1e-7);
  }
}

TEST(Pipeline, InvariantUnderSideRelabelling) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto set = fixtures::with_noise_everywhere(
        synth::apply_deformity(synth::random_symmetric_base(seed),
                               synth::default_deformity(synth::DeformityKind::HemifacialType1)),
        0.5, seed);
    const auto a = lager_pipeline(set);
    const auto b = lager_pipeline(fixtures::swap_sides(set));
    EXPECT_EQ(a.trace.elimination_order, b.trace.elimination_order);
    EXPECT_LT(plane_angle(a.plane, b.plane), 1e-7);
  }
}

TEST(Pipeline, Deterministic) {
  const auto set = fixtures::with_noise_everywhere(synth::random_symmetric_base(3), 2.0, 3);
  const auto a = lager_pipeline(set);
  const auto b = lager_pipeline(set);
  EXPECT_EQ(a.plane, b.plane);
  EXPECT_EQ(a.dropped_outliers, b.dropped_outliers);
  EXPECT_EQ(a.fit.diagnostics.objective_history, b.fit.diagnostics.objective_history);
}

TEST(Pipeline, WarnsWhenNoRegionIsClean) {
  const auto r = lager_pipeline(all_regions_asymmetric());
  EXPECT_EQ(r.severity, Severity::Severe);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("variance"), std::string::npos);
}

TEST(Pipeline, NoWarningForLocalisedDeformity) {
  const auto c = synth::make_case(synth::random_symmetric_base(1), Plane(),
                                  synth::default_deformity(synth::DeformityKind::HemifacialType2), 0.0, 0);
  const auto r = lager_pipeline(c.deformed_set);
  EXPECT_EQ(r.severity, Severity::Severe);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Pipeline, RejectsInvalidInput) {
  auto set = synth::nominal_landmarks();
  set.pairs[0].left = set.pairs[0].right;
  EXPECT_THROW(lager_pipeline(set), InvalidLandmarkSet);
}
