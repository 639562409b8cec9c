#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "lager/edma.hpp"
#include "lager/synth.hpp"
#include "oracles.hpp"

using namespace lager;
using synth::DeformityKind;

TEST(Symmetric, BaseIsMirrorSymmetric) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto set = synth::random_symmetric_base(seed);
    EXPECT_TRUE(find_violations(set).empty());
    for (const auto& l : set.unpaired) EXPECT_EQ(l.position.x(), 0.0);
    for (const auto& p : set.pairs) {
      EXPECT_GE(p.right.x(), 10.0);
      EXPECT_EQ(p.left, Vec3(-p.right.x(), p.right.y(), p.right.z()));
    }
    for (double h : oracle::log_ratios(set)) EXPECT_EQ(h, 0.0);
  }
  EXPECT_EQ(synth::random_symmetric_base(4), synth::random_symmetric_base(4));
}

TEST(Symmetric, SymmetrizeProducesZeroRatios) {
  const auto t = fixtures::random_rigid(1);
  const auto noisy = fixtures::with_noise_everywhere(t.apply(synth::random_symmetric_base(2)), 3.0, 9);
  const Plane plane = t.apply(Plane());
  const auto sym = synth::symmetrize(noisy, plane);
  for (double h : oracle::log_ratios(sym)) EXPECT_NEAR(h, 0.0, 1e-12);
  for (const auto& l : sym.unpaired) EXPECT_NEAR(point_plane_distance(l.position, plane), 0.0, 1e-12);
  const auto twice = synth::symmetrize(sym, plane);
  for (std::size_t i = 0; i < sym.pairs.size(); ++i) {
    EXPECT_LT((twice.pairs[i].left - sym.pairs[i].left).norm(), 1e-12);
  }
}

TEST(Deformity, KindNamesRoundTrip) {
  for (auto kind : synth::all_deformity_kinds()) {
    EXPECT_EQ(synth::parse_deformity_kind(synth::to_string(kind)), kind);
  }
  EXPECT_EQ(synth::parse_deformity_kind("hch"), DeformityKind::HorizontalCondylarHyperplasia);
  EXPECT_EQ(synth::parse_deformity_kind("type2"), DeformityKind::HemifacialType2);
  EXPECT_FALSE(synth::parse_deformity_kind("type3").has_value());
}

TEST(Deformity, ZeroMagnitudeIsIdentity) {
  const auto base = synth::random_symmetric_base(3);
  for (auto kind : synth::all_deformity_kinds()) {
    auto spec = synth::default_deformity(kind);
    spec.magnitude = 0.0;
    EXPECT_EQ(synth::apply_deformity(base, spec), base);
  }
}

TEST(Deformity, OnlyAffectedPointsMove) {
  const auto base = synth::random_symmetric_base(5);
  for (auto kind : synth::all_deformity_kinds()) {
    for (Side side : {Side::Right, Side::Left}) {
      const auto spec = synth::default_deformity(kind, side);
      const auto out = synth::apply_deformity(base, spec);
      const auto affected = synth::affected_points(base, spec);
      for (const auto& id : base.point_ids()) {
        const bool moved = *out.point(id) != *base.point(id);
        const bool listed = std::find(affected.begin(), affected.end(), id) != affected.end();
        if (!listed) {
          EXPECT_FALSE(moved) << to_string(id);
        }
      }
      // The region core moves by the full magnitude.
      const std::string core = kind == DeformityKind::HorizontalCondylarHyperplasia ||
                                       kind == DeformityKind::VerticalCondylarHyperplasia
                                   ? "Co"
                                   : "Gos";
      const PointId id{core, side};
      EXPECT_NEAR((*out.point(id) - *base.point(id)).norm(), spec.magnitude, 1e-12);
      EXPECT_GE(classify_mean_t(t_scores(out).mean()), Severity::MildModerate);
    }
  }
}

TEST(Deformity, LeftIsMirrorOfRight) {
  const auto base = synth::random_symmetric_base(6);
  for (auto kind : synth::all_deformity_kinds()) {
    const auto right = synth::apply_deformity(base, synth::default_deformity(kind, Side::Right));
    const auto left = synth::apply_deformity(base, synth::default_deformity(kind, Side::Left));
    for (std::size_t i = 0; i < base.pairs.size(); ++i) {
      const Vec3& r = right.pairs[i].right;
      EXPECT_LT((left.pairs[i].left - Vec3(-r.x(), r.y(), r.z())).norm(), 1e-12);
    }
    for (std::size_t i = 0; i < base.unpaired.size(); ++i) {
      const Vec3& r = right.unpaired[i].position;
      EXPECT_LT((left.unpaired[i].position - Vec3(-r.x(), r.y(), r.z())).norm(), 1e-12);
    }
  }
}

TEST(Deformity, RejectsBadSpecs) {
  const auto base = synth::random_symmetric_base(1);
  auto spec = synth::default_deformity(DeformityKind::HemifacialType1);
  spec.affected.push_back("Zy");
  EXPECT_THROW(synth::apply_deformity(base, spec), InputError);
  spec = synth::default_deformity(DeformityKind::HemifacialType1);
  spec.side = Side::Midline;
  EXPECT_THROW(synth::apply_deformity(base, spec), InputError);
  spec.side = Side::Left;
  spec.magnitude = -1.0;
  EXPECT_THROW(synth::apply_deformity(base, spec), InputError);
}

TEST(Noise, ZeroSdIsIdentity) {
  const auto base = synth::random_symmetric_base(1);
  const auto ids = base.point_ids();
  EXPECT_EQ(synth::add_fluctuating_noise(base, ids, 0.0, 7), base);
  EXPECT_THROW(synth::add_fluctuating_noise(base, ids, -1.0, 7), InputError);
}

TEST(Noise, DeterministicAndConfined) {
  const auto base = synth::random_symmetric_base(2);
  const auto spec = synth::default_deformity(DeformityKind::HemifacialType2);
  const auto quiet = synth::unaffected_points(base, spec);
  const auto a = synth::add_fluctuating_noise(base, quiet, 3.0, 42);
  EXPECT_EQ(a, synth::add_fluctuating_noise(base, quiet, 3.0, 42));
  EXPECT_NE(a, synth::add_fluctuating_noise(base, quiet, 3.0, 43));
  for (const auto& id : synth::affected_points(base, spec)) EXPECT_EQ(*a.point(id), *base.point(id));
  for (const auto& id : quiet) EXPECT_NE(*a.point(id), *base.point(id));

  // List order does not matter.
  auto reversed = quiet;
  std::reverse(reversed.begin(), reversed.end());
  EXPECT_EQ(a, synth::add_fluctuating_noise(base, reversed, 3.0, 42));
}

TEST(Noise, PerCoordinateStandardDeviation) {
  const auto base = synth::random_symmetric_base(0);
  const auto ids = base.point_ids();
  std::vector<double> offsets;
  for (std::uint64_t seed = 0; offsets.size() < 10000; ++seed) {
    const auto out = synth::add_fluctuating_noise(base, ids, 3.0, seed);
    for (const auto& id : ids) {
      const Vec3 d = *out.point(id) - *base.point(id);
      offsets.insert(offsets.end(), {d.x(), d.y(), d.z()});
    }
  }
  EXPECT_NEAR(oracle::mean(offsets), 0.0, 0.1);
  const double sd = std::sqrt(oracle::sample_variance(offsets));
  EXPECT_GE(sd, 2.9);
  EXPECT_LE(sd, 3.1);
}

TEST(Case, GroundTruthAndDeformedSetsAgreeOnUnaffectedPointsWithoutNoise) {
  const auto spec = synth::default_deformity(DeformityKind::VerticalCondylarHyperplasia, Side::Left);
  const auto c = synth::make_case(synth::random_symmetric_base(9), Plane(), spec, 0.0, 1);
  for (const auto& id : synth::unaffected_points(c.ground_truth_set, spec)) {
    EXPECT_EQ(*c.deformed_set.point(id), *c.ground_truth_set.point(id));
  }
  EXPECT_EQ(c.ground_truth_plane, Plane());
}

TEST(Metrics, PerfectFitPasses) {
  const auto base = synth::random_symmetric_base(2);
  const auto m = synth::outcome_metrics(Plane(), Plane(), base);
  EXPECT_EQ(m.theta, 0.0);
  EXPECT_EQ(m.dist_n, 0.0);
  EXPECT_EQ(m.dist_u1, 0.0);
  EXPECT_EQ(m.dist_pg, 0.0);
  EXPECT_TRUE(m.pass);
}

TEST(Metrics, DistancesAndAngle) {
  const auto base = synth::nominal_landmarks();
  const Plane tilted = canonicalize_plane(Vec3(std::cos(0.01), std::sin(0.01), 0), -0.2);
  const auto m = synth::outcome_metrics(tilted, Plane(), base);
  EXPECT_NEAR(m.theta, 0.01 * 180 / std::numbers::pi, 1e-12);
  for (auto [name, value] : {std::pair{"N", m.dist_n}, {"U1", m.dist_u1}, {"Pg", m.dist_pg}}) {
    const Vec3 p = base.find_unpaired(name)->position;
    EXPECT_NEAR(value, std::abs(std::cos(0.01) * p.x() + std::sin(0.01) * p.y() - 0.2), 1e-12) << name;
  }
}

TEST(Metrics, CriteriaThresholds) {
  EXPECT_TRUE(synth::meets_criteria({0.13, 0.18, 0.36, 0.4, false}));
  EXPECT_FALSE(synth::meets_criteria({2.5, 0.18, 0.36, 0.4, false}));
  EXPECT_FALSE(synth::meets_criteria({0.13, 1.0, 0.36, 0.4, false}));
  EXPECT_FALSE(synth::meets_criteria({0.13, 0.18, 1.2, 0.4, false}));
  EXPECT_FALSE(synth::meets_criteria({0.13, 0.18, 0.36, 2.0, false}));
}

TEST(Seeds, DerivedSeedsDiffer) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 1000; ++s) seen.insert(synth::derive_seed(7, s));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_NE(synth::derive_seed(7, 0), synth::derive_seed(8, 0));
}

TEST(Benchmark, TwentyDeterministicRows) {
  synth::BenchmarkConfig config;
  const auto a = synth::run_benchmark(config);
  const auto b = synth::run_benchmark(config);
  ASSERT_EQ(a.rows.size(), 20u);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].subject, i / 4 + 1);
    EXPECT_EQ(a.rows[i].spec.kind, synth::all_deformity_kinds()[i % 4]);
    EXPECT_TRUE(a.rows[i].error.empty()) << a.rows[i].error;
    EXPECT_EQ(a.rows[i].metrics, b.rows[i].metrics);
    EXPECT_EQ(a.rows[i].noise_seed, b.rows[i].noise_seed);
  }
}

TEST(Benchmark, NoiseFreeSeverityBands) {
  synth::BenchmarkConfig config;
  config.noise_sd = 0.0;
  for (const auto& c : synth::generate_cases(config)) {
    const double mean_t = oracle::mean([&] {
      std::vector<double> t;
      for (const auto& s : oracle::brute_t_scores(c.deformed_set)) t.push_back(s.t);
      return t;
    }());
    if (c.spec.kind == DeformityKind::HemifacialType2) {
      EXPECT_GE(mean_t, 0.04) << synth::to_string(c.spec.kind);
    } else {
      EXPECT_GE(mean_t, 0.02) << synth::to_string(c.spec.kind);
      EXPECT_LT(mean_t, 0.04) << synth::to_string(c.spec.kind);
    }
  }
}
