#include <benchmark/benchmark.h>

#include "wigig/blockage_detector.hpp"
#include "wigig/link_model.hpp"
#include "wigig/picocell_sim.hpp"

namespace {

void BM_EuclideanDistance(benchmark::State& state) {
  const wigig::BlockageFeatures f{8.0, 2.0};
  const wigig::Centroid c{2, 7.30, 1.56};
  for (auto _ : state) {
    benchmark::DoNotOptimize(wigig::euclidean_distance(f, c));
  }
}
BENCHMARK(BM_EuclideanDistance);

void BM_Classify(benchmark::State& state) {
  const auto centroids = wigig::centroids_for(wigig::DistanceBucket::Far7m);
  const wigig::BlockageFeatures f{6.1, 3.3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(wigig::classify(f, centroids));
  }
}
BENCHMARK(BM_Classify);

void BM_DetectorStep(benchmark::State& state) {
  wigig::Rng rng = wigig::make_rng(1);
  const std::vector<wigig::Segment> segs{
      wigig::sample_episode(wigig::Scenario::Transient, 7.0, rng)};
  wigig::RenderOptions opts;
  opts.duration_ms = 20000;
  wigig::LinkConfig link;
  link.distance_m = 7.0;
  const auto trace = wigig::render_trace(segs, link, rng, opts);
  for (auto _ : state) {
    wigig::BlockageDetector det;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      benchmark::DoNotOptimize(det.step(trace.time_at(i), trace.q[i]));
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(trace.size()));
}
BENCHMARK(BM_DetectorStep)->Unit(benchmark::kMillisecond);

void BM_SampleEpisode(benchmark::State& state) {
  const wigig::EpisodeSampler sampler;
  wigig::Rng rng = wigig::make_rng(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampler.sample(wigig::Scenario::PermanentWithNlos, 3.0, rng));
  }
}
BENCHMARK(BM_SampleEpisode);

void BM_SimulateStaticMinute(benchmark::State& state) {
  wigig::ScenarioConfig cfg;
  cfg.duration_ms = 60000;
  cfg.aps = {{1, {0, 0, 1}, 0.0, wigig::Environment::IndoorRoom}};
  cfg.stas = {{1, {{0, {3, 0, 1}}}, 1}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(wigig::run(cfg));
  }
}
BENCHMARK(BM_SimulateStaticMinute)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
