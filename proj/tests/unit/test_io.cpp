#include <gtest/gtest.h>

#include <random>

#include "lager/io.hpp"
#include "lager/pipeline.hpp"
#include "lager/synth.hpp"
#include "oracles.hpp"

using namespace lager;

namespace {

const char* kSmallFile = R"({
  "format_version": "1",
  "units": "mm",
  "unpaired": [
    {"name": "N", "xyz": [0, 70, 10]},
    {"name": "Pg", "xyz": [0.5, 65, -100]}
  ],
  "pairs": [
    {"name": "Co", "right_xyz": [50, 0, -10], "left_xyz": [-50, 0, -10]},
    {"name": "Go", "right_xyz": [45, 10, -70], "left_xyz": [-46, 10, -70]}
  ]
})";

std::string error_of(const auto& fn) {
  try {
    fn();
  } catch (const io::FormatError& e) {
    return e.what();
  } catch (const InputError& e) {
    return std::string("input: ") + e.what();
  }
  return {};
}

}  // namespace

TEST(LandmarkFile, ParsesSmallFile) {
  const auto set = io::parse_landmark_file(kSmallFile);
  ASSERT_EQ(set.unpaired_count(), 2u);
  ASSERT_EQ(set.pair_count(), 2u);
  EXPECT_EQ(set.unpaired[1].name, "Pg");
  EXPECT_EQ(set.unpaired[1].position, Vec3(0.5, 65, -100));
  EXPECT_EQ(set.pairs[1].left, Vec3(-46, 10, -70));
}

TEST(LandmarkFile, RoundTripsCatalogSubject) {
  const auto set = fixtures::with_noise_everywhere(synth::random_symmetric_base(3), 2.0, 1);
  const auto text = io::write_landmark_file(set);
  const auto back = io::parse_landmark_file(text);
  EXPECT_EQ(back.unpaired_count(), 11u);
  EXPECT_EQ(back.pair_count(), 13u);
  EXPECT_EQ(back, set);
  EXPECT_EQ(io::write_landmark_file(back), text);
}

TEST(LandmarkFile, RejectsOtherUnits) {
  std::string text = kSmallFile;
  text.replace(text.find("\"mm\""), 4, "\"cm\"");
  EXPECT_NE(error_of([&] { io::parse_landmark_file(text); }).find("units"), std::string::npos);
}

TEST(LandmarkFile, NamesDuplicateLandmark) {
  std::string text = kSmallFile;
  text.replace(text.find("\"Go\""), 4, "\"Co\"");
  const auto message = error_of([&] { io::parse_landmark_file(text); });
  EXPECT_NE(message.find("Co"), std::string::npos) << message;
  EXPECT_NE(message.find("invalid landmark set"), std::string::npos);
  EXPECT_EQ(message.find("coincident"), std::string::npos) << message;
}

TEST(LandmarkFile, NamesFieldPath) {
  std::string text = kSmallFile;
  text.replace(text.find("[-46, 10, -70]"), 14, "[-46, 10]");
  const auto message = error_of([&] { io::parse_landmark_file(text); });
  EXPECT_NE(message.find("pairs[1].left_xyz"), std::string::npos) << message;

  text = kSmallFile;
  text.replace(text.find("\"xyz\": [0, 70, 10]"), 18, "\"xyz\": [0, 70, 10], \"colour\": 1");
  const auto unknown = error_of([&] { io::parse_landmark_file(text); });
  EXPECT_NE(unknown.find("unpaired[0].colour"), std::string::npos) << unknown;
}

TEST(LandmarkFile, ReportsSyntaxPosition) {
  const auto message = error_of([] { io::parse_landmark_file("{\n  \"units\": \"mm\",\n  oops\n}"); });
  EXPECT_NE(message.find("line 3"), std::string::npos) << message;
  EXPECT_NE(message.find("column"), std::string::npos) << message;
}

TEST(PlaneFile, WritesCanonicalDefault) {
  const auto text = io::write_plane(Plane());
  const auto back = io::parse_plane(text);
  EXPECT_EQ(back, Plane());
  EXPECT_NE(text.find("\"normal\": [1, 0, 0]"), std::string::npos) << text;
  EXPECT_NE(text.find("\"offset\": 0"), std::string::npos) << text;
}

TEST(PlaneFile, RoundTripsBitwise) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  for (int i = 0; i < 2000; ++i) {
    const Plane p = canonicalize_plane(Vec3(g(rng), g(rng), g(rng)), 100 * g(rng));
    EXPECT_EQ(io::parse_plane(io::write_plane(p)), p);
  }
}

TEST(PlaneFile, CanonicalizesOnRead) {
  const auto p = io::parse_plane(R"({"format_version": "1", "units": "mm", "normal": [-2, 0, 0], "offset": 6})");
  EXPECT_EQ(p.normal(), Vec3(1, 0, 0));
  EXPECT_EQ(p.offset(), -3.0);
  EXPECT_THROW(io::parse_plane(R"({"format_version": "1", "units": "mm", "normal": [0, 0, 0], "offset": 0})"),
               InputError);
}

TEST(CaseFile, RoundTrips) {
  const auto spec = synth::default_deformity(synth::DeformityKind::HemifacialType2, Side::Left);
  const auto c = synth::make_case(synth::random_symmetric_base(2), Plane(), spec, 3.0, 99);
  const auto text = io::write_case(c);
  const auto back = io::parse_case(text);
  EXPECT_EQ(back.spec.kind, c.spec.kind);
  EXPECT_EQ(back.spec.side, c.spec.side);
  EXPECT_EQ(back.spec.magnitude, c.spec.magnitude);
  EXPECT_EQ(back.spec.affected, c.spec.affected);
  EXPECT_EQ(back.noise_seed, 99u);
  EXPECT_EQ(back.noise_sd, 3.0);
  EXPECT_EQ(back.ground_truth_plane, c.ground_truth_plane);
  EXPECT_EQ(back.ground_truth_set, c.ground_truth_set);
  EXPECT_EQ(back.deformed_set, c.deformed_set);
  EXPECT_EQ(io::write_case(back), text);
  EXPECT_EQ(io::parse_ground_truth(text), c.ground_truth_plane);
  EXPECT_EQ(io::parse_ground_truth(io::write_plane(Plane())), Plane());
}

TEST(Digest, Fnv1a64) {
  EXPECT_EQ(io::fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(io::fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(io::fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(Report, RoundTripsAndIsStable) {
  const auto c = synth::make_case(synth::random_symmetric_base(4), Plane(),
                                  synth::default_deformity(synth::DeformityKind::HemifacialType1), 1.0, 5);
  const auto input = io::write_landmark_file(c.deformed_set);
  const PipelineOptions options;
  const auto result = lager_pipeline(io::parse_landmark_file(input), options);
  const auto metrics = synth::outcome_metrics(result.plane, c);
  const auto report = io::make_report(result, options, input, metrics);

  EXPECT_EQ(report.input_digest, io::fnv1a_hex(input));
  EXPECT_EQ(report.elimination_order, result.trace.elimination_order);
  EXPECT_EQ(report.stages.size(), result.trace.stage_tscores.size());
  EXPECT_EQ(report.dropped_outliers, result.dropped_outliers);
  EXPECT_EQ(report.plane, result.plane);
  EXPECT_EQ(report.fit.stop_reason, "gradient_tolerance");

  const auto text = io::write_report(report);
  const auto back = io::parse_report(text);
  EXPECT_EQ(back, report);
  EXPECT_EQ(io::write_report(back), text);

  const auto again = io::make_report(lager_pipeline(io::parse_landmark_file(input), options), options, input, metrics);
  EXPECT_EQ(io::write_report(again), text);
}

TEST(Files, ReadMissingFileNamesPath) {
  try {
    io::read_text_file("/nonexistent/landmarks.json");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/landmarks.json"), std::string::npos);
  }
}
