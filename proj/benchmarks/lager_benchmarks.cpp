#include <benchmark/benchmark.h>

#include "lager/edma.hpp"
#include "lager/pipeline.hpp"
#include "lager/synth.hpp"

namespace {

lager::LandmarkSet deformed_subject(lager::synth::DeformityKind kind, double noise_sd) {
  const auto base = lager::synth::random_symmetric_base(7);
  return lager::synth::make_case(base, lager::Plane(), lager::synth::default_deformity(kind), noise_sd, 11)
      .deformed_set;
}

void BM_TScores(benchmark::State& state) {
  const auto set = deformed_subject(lager::synth::DeformityKind::HemifacialType2, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(lager::t_scores(set));
}
BENCHMARK(BM_TScores);

void BM_RankLandmarks(benchmark::State& state) {
  const auto set = deformed_subject(lager::synth::DeformityKind::HemifacialType2, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(lager::rank_landmarks(set));
}
BENCHMARK(BM_RankLandmarks)->Unit(benchmark::kMillisecond);

void BM_FitPlane(benchmark::State& state) {
  const auto set = deformed_subject(lager::synth::DeformityKind::HorizontalCondylarHyperplasia, 3.0);
  lager::FitConfig config;
  config.gamma = static_cast<double>(state.range(0));
  const auto problem = lager::build_problem(set, config);
  for (auto _ : state) benchmark::DoNotOptimize(lager::fit_plane(problem, config));
}
BENCHMARK(BM_FitPlane)->Arg(0)->Arg(480)->Unit(benchmark::kMicrosecond);

void BM_SolveQuadratic(benchmark::State& state) {
  const auto set = deformed_subject(lager::synth::DeformityKind::HorizontalCondylarHyperplasia, 3.0);
  const auto problem = lager::build_problem(set, lager::FitConfig{});
  for (auto _ : state) benchmark::DoNotOptimize(lager::solve_quadratic(problem, 480.0));
}
BENCHMARK(BM_SolveQuadratic);

void BM_Pipeline(benchmark::State& state) {
  const auto set = deformed_subject(lager::synth::DeformityKind::HemifacialType2, 3.0);
  for (auto _ : state) benchmark::DoNotOptimize(lager::lager_pipeline(set));
}
BENCHMARK(BM_Pipeline)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
