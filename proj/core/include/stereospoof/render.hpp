#pragma once

#include <cstdint>
#include <vector>

#include "stereospoof/geometry.hpp"
#include "stereospoof/image.hpp"

namespace stereospoof {

enum class BackgroundKind { FlatTextured, FrontoparallelWall, Corridor };

// Parameterized synthetic backgrounds. All are deterministic functions of
// (rig, spec): the same inputs produce bit-identical frames.
struct SceneSpec {
  BackgroundKind background = BackgroundKind::FrontoparallelWall;
  double wall_depth_m = 4.0;   // FrontoparallelWall
  double flat_depth_m = 10.0;  // FlatTextured renders at this single fixed depth
  double near_m = 2.0;         // Corridor: depth at the bottom image row
  double far_m = 12.0;         // Corridor: depth at the top image row
  double ambient_lux = 0.0;    // [0, 4000]; background brightness scales as lux/4000
  uint64_t texture_seed = 0;

  void validate() const;  // throws ConfigError
};

// Scene depth the detector should treat as "background" for blob analysis.
double background_depth_m(const SceneSpec& scene);

// True scene depth of image row y (0 = top) out of `height` rows; this is
// the law render_scene shifts the right image by.
double scene_row_depth_m(const SceneSpec& scene, int y, int height);

// One rendered light blob: a Gaussian falloff around `center` (principal-
// point-relative coordinates), nominal core radius `radius_px`, falloff
// `sigma_px`, brightness scale `peak_intensity` in (0,1].
struct GlareSpec {
  ImagePoint center;
  double radius_px = 12.0;
  double peak_intensity = 1.0;
  double sigma_px = 6.0;
};

struct AttackPlacement {
  std::vector<GlareSpec> left_glares;
  std::vector<GlareSpec> right_glares;
  std::vector<GlareSpec> left_orbs;
  std::vector<GlareSpec> right_orbs;
  // Absolute pixel position of the principal point, so compositing can map
  // the principal-point-relative blob centers onto the frame.
  double origin_x_px = 0.0;
  double origin_y_px = 0.0;
};

struct AutoExposure {
  bool enabled = true;
  double target_mean = 100.0 / 255.0;  // fraction of full scale
};

// Renders the background stereo pair. Every background pixel's true
// disparity follows f*b/depth for its scene depth (the right image is the
// same texture shifted by the per-row disparity).
StereoFrame render_scene(const StereoRig& rig, const SceneSpec& scene);

// Projects the two sources into both cameras and assigns light intensities
// per the attack pattern. Beams/Combined emit the direct glares; Orbs/
// Combined additionally spawn a centrosymmetric green-dominant orb per
// bright hit (a pure orbs attack aims between the lenses, so it emits orbs
// only). Hits may land outside the frame; their orbs are still emitted
// (compositing clips).
AttackPlacement place_attack(const StereoRig& rig, const AttackGeometry& geo,
                             uint64_t jitter_seed = 0);

// Adds the placement's blobs to the frame (glares white, orbs green-dominant
// with R,B at 0.35 of G), clamps to [0,255], then applies a per-camera
// auto-exposure gain min(1, target_mean / current_mean).
StereoFrame composite(const StereoFrame& frame, const AttackPlacement& placement,
                      const AutoExposure& exposure = {});

// Glare core radius law used by place_attack: 12 px at 4 m, scaling as 1/z,
// clamped to [2, 64] px. Orbs use 1.5x the glare radius.
double glare_radius_px(double distance_m);

// Matcher disparity budget wide enough for the attack's false matches: the
// crossed-pair disparity (the largest any mechanism produces) plus two blob
// radii of margin, padded and rounded up to a multiple of 16, clamped to
// [64, 560].
int suggested_max_disparity(const StereoRig& rig, const AttackGeometry& geo);

}  // namespace stereospoof
