#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "stereospoof/analysis.hpp"
#include "stereospoof/depthmap.hpp"
#include "stereospoof/matching.hpp"
#include "stereospoof/render.hpp"

using namespace stereospoof;

namespace {

// Full pipeline: render + inject + match + triangulate.
DepthMap attacked_depth(const StereoRig& rig, const SceneSpec& scene, const AttackGeometry& geo,
                        MatchAlgorithm algorithm) {
  const StereoFrame clean = render_scene(rig, scene);
  const AttackPlacement placement = place_attack(rig, geo);
  const StereoFrame frame = composite(clean, placement);
  MatcherConfig cfg;
  cfg.algorithm = algorithm;
  cfg.max_disparity = suggested_max_disparity(rig, geo);
  return to_depth(match(frame, cfg), rig);
}

SceneSpec dim_wall() {
  SceneSpec scene;
  scene.background = BackgroundKind::FrontoparallelWall;
  scene.wall_depth_m = 12.0;
  scene.ambient_lux = 100.0;  // faint texture anchors the matchers at night
  return scene;
}

}  // namespace

TEST_CASE("clean scenes report no fake obstacle") {
  StereoRig rig;
  for (double lux : {100.0, 2000.0}) {
    SceneSpec scene = dim_wall();
    scene.ambient_lux = lux;
    const StereoFrame frame = render_scene(rig, scene);
    MatcherConfig cfg;
    cfg.max_disparity = 64;
    const DepthMap depth = to_depth(match(frame, cfg), rig);
    const FakeDepthReport report = detect_fake_depth(depth, background_depth_m(scene));
    CHECK_FALSE(report.detected);
    CHECK_FALSE(report.success);
    CHECK(report.blob_area_px == 0.0);
  }
}

TEST_CASE("crossed-beams attack plants a near blob at the predicted depth") {
  StereoRig rig;
  AttackGeometry geo;
  geo.separation_m = 1.0;
  geo.distance_m = 9.0;
  geo.pattern = AttackPattern::XShape;
  geo.mode = AttackMode::Beams;

  SceneSpec night = dim_wall();
  night.ambient_lux = 0.0;
  const DepthMap depth = attacked_depth(rig, night, geo, MatchAlgorithm::BlockSAD);

  const auto preds = predict_fake_depth(rig, geo);
  REQUIRE(preds.size() == 1);
  REQUIRE(preds[0].exists);
  const FakeDepthReport report =
      detect_fake_depth(depth, background_depth_m(night), DetectConfig{}, preds[0]);
  CHECK(report.detected);
  CHECK(report.blob_area_px >= DetectConfig{}.min_blob_area_px);
  const double expected = 0.12 / 1.12 * 9.0;
  CHECK(std::abs(report.measured_depth_m - expected) / expected <= 0.25);
  CHECK(report.relative_error <= 0.25);
  CHECK(report.success);  // 0.96 m is far below the 6 m trigger
}

TEST_CASE("orb pair under a wide trapezoid produces the far-mechanism depth") {
  StereoRig rig;
  AttackGeometry geo;
  geo.separation_m = 1.0;  // d > b
  geo.distance_m = 2.0;
  geo.pattern = AttackPattern::Trapezoid;
  geo.mode = AttackMode::Orbs;

  const auto preds = predict_fake_depth(rig, geo);
  REQUIRE(preds.size() == 1);
  REQUIRE(preds[0].source == FakeDepthSource::OrbsTrapezoid);
  REQUIRE(preds[0].exists);
  CHECK(preds[0].depth_m == doctest::Approx(0.12 / 0.88 * 2.0));

  const DepthMap depth = attacked_depth(rig, dim_wall(), geo, MatchAlgorithm::BlockSAD);
  const FakeDepthReport report =
      detect_fake_depth(depth, 12.0, DetectConfig{}, preds[0]);
  CHECK(report.detected);
  CHECK(report.relative_error <= 0.25);
}

TEST_CASE("attack sensitivity holds for both algorithms across the distance range") {
  StereoRig rig;
  const SceneSpec night = dim_wall();
  for (MatchAlgorithm algorithm : {MatchAlgorithm::BlockSAD, MatchAlgorithm::SemiGlobal}) {
    for (double z : {4.0, 6.0, 9.0}) {
      AttackGeometry geo;
      geo.separation_m = 1.0;
      geo.distance_m = z;
      geo.pattern = AttackPattern::XShape;
      geo.mode = AttackMode::Beams;
      const auto preds = predict_fake_depth(rig, geo);
      REQUIRE(preds[0].exists);
      const DepthMap depth = attacked_depth(rig, night, geo, algorithm);
      const FakeDepthReport report =
          detect_fake_depth(depth, background_depth_m(night), DetectConfig{}, preds[0]);
      INFO("algorithm=", to_string(algorithm), " z=", z);
      CHECK(report.detected);
      CHECK(report.relative_error <= 0.25);
    }
  }
}

TEST_CASE("detector honors the minimum blob area") {
  // Synthetic map: a 3x3 deviating patch (9 px < 25) on a uniform background.
  StereoRig rig;
  rig.image_width_px = 64;
  rig.image_height_px = 64;
  DepthMap depth;
  depth.width = 64;
  depth.height = 64;
  depth.rig = rig;
  depth.values.assign(64 * 64, 12.0f);
  depth.valid.assign(64 * 64, 1);
  for (int y = 20; y < 23; ++y) {
    for (int x = 30; x < 33; ++x) depth.values[size_t(y) * 64 + x] = 1.0f;
  }
  FakeDepthReport report = detect_fake_depth(depth, 12.0);
  CHECK_FALSE(report.detected);

  // Grow the patch past the area floor and it is picked up.
  for (int y = 20; y < 26; ++y) {
    for (int x = 30; x < 36; ++x) depth.values[size_t(y) * 64 + x] = 1.0f;
  }
  report = detect_fake_depth(depth, 12.0);
  CHECK(report.detected);
  CHECK(report.blob_area_px == 36.0);
  CHECK(report.measured_depth_m == doctest::Approx(1.0));
  CHECK(report.success);

  // The largest deviating component wins.
  for (int y = 40; y < 50; ++y) {
    for (int x = 10; x < 20; ++x) depth.values[size_t(y) * 64 + x] = 3.0f;
  }
  report = detect_fake_depth(depth, 12.0);
  CHECK(report.blob_area_px == 100.0);
  CHECK(report.measured_depth_m == doctest::Approx(3.0));
}

TEST_CASE("success demands a detection below the avoidance trigger") {
  StereoRig rig;
  rig.image_width_px = 32;
  rig.image_height_px = 32;
  DepthMap depth;
  depth.width = 32;
  depth.height = 32;
  depth.rig = rig;
  depth.values.assign(32 * 32, 12.0f);
  depth.valid.assign(32 * 32, 1);
  for (int y = 5; y < 15; ++y) {
    for (int x = 5; x < 15; ++x) depth.values[size_t(y) * 32 + x] = 7.0f;  // deviates, but > 6 m
  }
  const FakeDepthReport report = detect_fake_depth(depth, 12.0);
  CHECK(report.detected);
  CHECK_FALSE(report.success);
}

TEST_CASE("expected table reproduces both rounded columns") {
  StereoRig rig;
  std::vector<double> distances;
  for (int z = 1; z <= 16; ++z) distances.push_back(z);
  const auto rows = expected_table(rig, 1.0, distances);
  REQUIRE(rows.size() == 16);

  const std::vector<double> x_expected = {0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 1.0,
                                          1.0, 1.0, 1.0, 1.5, 1.5, 1.5, 1.5, 1.5};
  const std::vector<double> t_expected = {0.5, 0.5, 0.5, 1.0, 1.0, 1.0, 1.0, 1.0,
                                          1.0, 1.5, 1.5, 1.5, 2.0, 2.0, 2.0, 2.0};
  for (int i = 0; i < 16; ++i) {
    CHECK(rows[i].distance_m == doctest::Approx(i + 1.0));
    CHECK(rows[i].x_expected_m == doctest::Approx(x_expected[i]));
    CHECK(rows[i].trapezoid_expected_m == doctest::Approx(t_expected[i]));
    // d=1 > b: the feasible far mechanism is the orbs one.
    CHECK(rows[i].trapezoid_source == FakeDepthSource::OrbsTrapezoid);
    CHECK(rows[i].trapezoid_exists);
    // X column monotone non-decreasing in z.
    if (i > 0) CHECK(rows[i].x_expected_m >= rows[i - 1].x_expected_m);
  }

  // Narrow separation flips the trapezoid column to the beams mechanism.
  const auto narrow = expected_table(rig, 0.06, {4.0});
  REQUIRE(narrow.size() == 1);
  CHECK(narrow[0].trapezoid_source == FakeDepthSource::BeamsTrapezoid);
  CHECK(narrow[0].trapezoid_raw_m == doctest::Approx(8.0));

  const std::string csv = expected_table_to_csv(rows);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 17);  // header + 16 rows
}

TEST_CASE("saturation screen flags the bright plateau and stays quiet on clean frames") {
  StereoRig rig;
  AttackGeometry geo;
  geo.separation_m = 1.0;
  geo.distance_m = 2.0;  // largest glare core: plateau covers > 0.2% of the frame
  geo.pattern = AttackPattern::XShape;
  geo.mode = AttackMode::Beams;

  SceneSpec night = dim_wall();
  night.ambient_lux = 0.0;
  const StereoFrame frame = composite(render_scene(rig, night), place_attack(rig, geo));
  const SaturationReport report = detect_saturation(frame);
  CHECK(report.verdict == SaturationVerdict::Suspect);
  CHECK((report.left_fraction > 0.002 || report.right_fraction > 0.002));

  // >= 99% of the pixels inside each bright-glare core are flagged. The dim
  // crosstalk glare stays below the sensor's clip level by design, so the
  // screen keys on the direct-beam plateau alone.
  const AttackPlacement placement = place_attack(rig, geo);
  int core = 0, flagged = 0;
  for (const GlareSpec& g : placement.left_glares) {
    if (g.peak_intensity < geo.intensity_primary) continue;
    const double cx = placement.origin_x_px + g.center.u;
    const double cy = placement.origin_y_px + g.center.v;
    const double core_r = g.radius_px / 2.0;
    for (int y = 0; y < frame.left.height; ++y) {
      for (int x = 0; x < frame.left.width; ++x) {
        const double dx = x - cx, dy = y - cy;
        if (dx * dx + dy * dy > core_r * core_r) continue;
        ++core;
        if (report.left_mask.at(x, y)) ++flagged;
      }
    }
  }
  REQUIRE(core > 0);
  CHECK(double(flagged) / double(core) >= 0.99);

  // Clean scenes stay Clean across the ambient range (auto-exposure keeps
  // daytime backgrounds below the clip level).
  for (double lux : {0.0, 100.0, 2000.0, 4000.0}) {
    SceneSpec scene = dim_wall();
    scene.ambient_lux = lux;
    const StereoFrame clean = composite(render_scene(rig, scene), AttackPlacement{
                                            {}, {}, {}, {}, rig.principal_x_px,
                                            rig.principal_y_px});
    const SaturationReport r = detect_saturation(clean);
    CHECK(r.verdict == SaturationVerdict::Clean);
    CHECK(r.left_fraction == 0.0);
  }
}

TEST_CASE("saturation verdict follows the fraction threshold exactly") {
  // Hand-built frame: exactly controllable flagged fraction.
  StereoFrame frame;
  frame.left = ImageRgb8(100, 10);   // 1000 px; threshold 0.002 -> 2 px
  frame.right = ImageRgb8(100, 10);
  frame.left.at(0, 0) = Rgb8{255, 255, 255};
  frame.left.at(1, 0) = Rgb8{250, 250, 250};
  SaturationReport report = detect_saturation(frame);
  CHECK(report.left_fraction == doctest::Approx(0.002));
  CHECK(report.verdict == SaturationVerdict::Clean);  // strict >, not >=

  frame.left.at(2, 0) = Rgb8{251, 252, 250};
  report = detect_saturation(frame);
  CHECK(report.verdict == SaturationVerdict::Suspect);

  // One channel below the level keeps the pixel unflagged.
  frame.left.at(2, 0) = Rgb8{249, 255, 255};
  report = detect_saturation(frame);
  CHECK(report.verdict == SaturationVerdict::Clean);

  // Either camera alone can trip the verdict.
  frame.right.at(0, 0) = Rgb8{250, 250, 250};
  frame.right.at(1, 0) = Rgb8{250, 250, 250};
  frame.right.at(2, 0) = Rgb8{250, 250, 250};
  report = detect_saturation(frame);
  CHECK(report.verdict == SaturationVerdict::Suspect);
  CHECK(std::string(to_string(report.verdict)) == "suspect");
}

TEST_CASE("report serialization carries the headline fields") {
  StereoRig rig;
  rig.image_width_px = 32;
  rig.image_height_px = 32;
  DepthMap depth;
  depth.width = 32;
  depth.height = 32;
  depth.rig = rig;
  depth.values.assign(32 * 32, 12.0f);
  depth.valid.assign(32 * 32, 1);
  for (int y = 5; y < 15; ++y) {
    for (int x = 5; x < 15; ++x) depth.values[size_t(y) * 32 + x] = 1.0f;
  }
  const FakeDepthReport report = detect_fake_depth(depth, 12.0);
  const std::string kv = report_to_kv(report);
  CHECK(kv.find("detected=true") != std::string::npos);
  CHECK(kv.find("measured_depth_m=") != std::string::npos);
  CHECK(kv.find("success=true") != std::string::npos);
}
