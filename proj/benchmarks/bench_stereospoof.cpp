// Microbenchmarks for the hot paths: rendering, compositing, the two
// matchers at a few disparity budgets, and the end-to-end spoof pipeline.

#include <benchmark/benchmark.h>

#include "stereospoof/analysis.hpp"
#include "stereospoof/depthmap.hpp"
#include "stereospoof/flightsim.hpp"
#include "stereospoof/geometry.hpp"
#include "stereospoof/matching.hpp"
#include "stereospoof/render.hpp"

using namespace stereospoof;

namespace {

SceneSpec dim_wall() {
  SceneSpec scene;
  scene.background = BackgroundKind::FrontoparallelWall;
  scene.wall_depth_m = 12.0;
  scene.ambient_lux = 100.0;
  return scene;
}

AttackGeometry default_attack() {
  AttackGeometry geo;  // 1 m separation, 4 m range, crossed beams
  return geo;
}

const StereoFrame& attacked_frame() {
  static const StereoFrame frame = [] {
    StereoRig rig;
    return composite(render_scene(rig, dim_wall()), place_attack(rig, default_attack()));
  }();
  return frame;
}

}  // namespace

static void BM_render_scene(benchmark::State& state) {
  StereoRig rig;
  const SceneSpec scene = dim_wall();
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_scene(rig, scene));
  }
}
BENCHMARK(BM_render_scene)->Unit(benchmark::kMillisecond);

static void BM_composite(benchmark::State& state) {
  StereoRig rig;
  const StereoFrame clean = render_scene(rig, dim_wall());
  const AttackPlacement placement = place_attack(rig, default_attack());
  for (auto _ : state) {
    benchmark::DoNotOptimize(composite(clean, placement));
  }
}
BENCHMARK(BM_composite)->Unit(benchmark::kMillisecond);

static void BM_match_block_sad(benchmark::State& state) {
  MatcherConfig cfg;
  cfg.algorithm = MatchAlgorithm::BlockSAD;
  cfg.max_disparity = int(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(match(attacked_frame(), cfg));
  }
}
BENCHMARK(BM_match_block_sad)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_match_semi_global(benchmark::State& state) {
  MatcherConfig cfg;
  cfg.algorithm = MatchAlgorithm::SemiGlobal;
  cfg.max_disparity = int(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(match(attacked_frame(), cfg));
  }
}
BENCHMARK(BM_match_semi_global)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_predict_fake_depth(benchmark::State& state) {
  StereoRig rig;
  AttackGeometry geo = default_attack();
  geo.pattern = AttackPattern::Triangle;
  geo.mode = AttackMode::Combined;  // all four closed forms
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict_fake_depth(rig, geo));
  }
}
BENCHMARK(BM_predict_fake_depth);

static void BM_detect_fake_depth(benchmark::State& state) {
  StereoRig rig;
  MatcherConfig cfg;
  cfg.max_disparity = suggested_max_disparity(rig, default_attack());
  const DepthMap depth = to_depth(match(attacked_frame(), cfg), rig);
  for (auto _ : state) {
    benchmark::DoNotOptimize(detect_fake_depth(depth, 12.0));
  }
}
BENCHMARK(BM_detect_fake_depth)->Unit(benchmark::kMillisecond);

static void BM_run_scenario(benchmark::State& state) {
  const Scenario scenario = builtin_scenario("sudden_stop");
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_scenario(scenario));
  }
}
BENCHMARK(BM_run_scenario)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
