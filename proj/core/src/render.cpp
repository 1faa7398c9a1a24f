#include "stereospoof/render.hpp"

#include <algorithm>
#include <cmath>

namespace stereospoof {

namespace {

// Amplitude overdrive sized so a primary-intensity glare saturates into a
// flat 255 plateau out to r ~= sigma (what the over-saturation detector keys
// on and what makes the two bright glares byte-identical), while a
// secondary-intensity glare (0.55 x 1.7 < 1) never clamps and so stays
// photometrically and structurally distinct from the bright plateau. That
// asymmetry is what lets both matchers prefer the bright-bright false pair
// over the true bright-dim pair at every scale.
constexpr double kGlareOverdrive = 1.7;
// Orbs overdrive just past saturation at full intensity so night orbs peak at
// 255 while any auto-exposure gain < 1 pulls the peak strictly below 255.
constexpr double kOrbOverdrive = 1.3;
constexpr double kOrbRedBlueRatio = 0.35;
constexpr double kOrbRadiusFactor = 1.5;

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Lattice value in [0,1), a pure function of (seed, cell) so the texture is
// stable under any sampling order.
double lattice_value(uint64_t seed, int64_t ix, int64_t iy) {
  const uint64_t key = splitmix64(uint64_t(ix) * 0x9E3779B97F4A7C15ULL ^
                                  uint64_t(iy) * 0xC2B2AE3D27D4EB4FULL);
  return double(splitmix64(seed ^ key) >> 11) * 0x1.0p-53;
}

constexpr double kNoiseCellPx = 4.0;

// Bilinear value noise, continuous in x and y.
double texture_value(uint64_t seed, double x, double y) {
  const double gx = x / kNoiseCellPx;
  const double gy = y / kNoiseCellPx;
  const double fx0 = std::floor(gx);
  const double fy0 = std::floor(gy);
  const int64_t ix = int64_t(fx0);
  const int64_t iy = int64_t(fy0);
  const double tx = gx - fx0;
  const double ty = gy - fy0;
  const double v00 = lattice_value(seed, ix, iy);
  const double v10 = lattice_value(seed, ix + 1, iy);
  const double v01 = lattice_value(seed, ix, iy + 1);
  const double v11 = lattice_value(seed, ix + 1, iy + 1);
  const double a = v00 + (v10 - v00) * tx;
  const double b = v01 + (v11 - v01) * tx;
  return a + (b - a) * ty;
}

uint8_t texture_byte(uint64_t seed, double x, double y, double lux_scale) {
  const double t = texture_value(seed, x, y);
  const double v = (64.0 + t * 176.0) * lux_scale;
  return static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

}  // namespace

void SceneSpec::validate() const {
  if (ambient_lux < 0.0 || ambient_lux > 4000.0) throw ConfigError("ambient_lux must be in [0,4000]");
  switch (background) {
    case BackgroundKind::FlatTextured:
      if (!(flat_depth_m > 0.0)) throw ConfigError("flat_depth_m must be > 0");
      break;
    case BackgroundKind::FrontoparallelWall:
      if (!(wall_depth_m > 0.0)) throw ConfigError("wall_depth_m must be > 0");
      break;
    case BackgroundKind::Corridor:
      if (!(near_m > 0.0)) throw ConfigError("near_m must be > 0");
      if (!(near_m < far_m)) throw ConfigError("Corridor requires near_m < far_m");
      break;
  }
}

double background_depth_m(const SceneSpec& scene) {
  switch (scene.background) {
    case BackgroundKind::FlatTextured: return scene.flat_depth_m;
    case BackgroundKind::FrontoparallelWall: return scene.wall_depth_m;
    case BackgroundKind::Corridor: return (scene.near_m + scene.far_m) / 2.0;
  }
  return scene.wall_depth_m;
}

double scene_row_depth_m(const SceneSpec& scene, int y, int height) {
  switch (scene.background) {
    case BackgroundKind::FlatTextured:
      return scene.flat_depth_m;
    case BackgroundKind::FrontoparallelWall:
      return scene.wall_depth_m;
    case BackgroundKind::Corridor: {
      const double t = height > 1 ? double(y) / double(height - 1) : 0.0;
      return scene.far_m + (scene.near_m - scene.far_m) * t;  // top far, bottom near
    }
  }
  return scene.wall_depth_m;
}

StereoFrame render_scene(const StereoRig& rig, const SceneSpec& scene) {
  rig.validate();
  scene.validate();
  const int w = rig.image_width_px;
  const int h = rig.image_height_px;
  const double lux_scale = scene.ambient_lux / 4000.0;

  StereoFrame frame;
  frame.left = ImageRgb8(w, h);
  frame.right = ImageRgb8(w, h);
  for (int y = 0; y < h; ++y) {
    const double depth = scene_row_depth_m(scene, y, h);
    const double disparity = rig.focal_length_px * rig.baseline_m / depth;
    for (int x = 0; x < w; ++x) {
      const uint8_t vl = texture_byte(scene.texture_seed, double(x), double(y), lux_scale);
      const uint8_t vr = texture_byte(scene.texture_seed, double(x) + disparity, double(y), lux_scale);
      frame.left.at(x, y) = Rgb8{vl, vl, vl};
      frame.right.at(x, y) = Rgb8{vr, vr, vr};
    }
  }
  return frame;
}

double glare_radius_px(double distance_m) {
  const double r = 12.0 * (4.0 / distance_m);
  return std::clamp(r, 2.0, 64.0);
}

AttackPlacement place_attack(const StereoRig& rig, const AttackGeometry& geo, uint64_t jitter_seed) {
  rig.validate();
  geo.validate();

  const double z = geo.distance_m;
  const double px = -geo.separation_m / 2.0 + geo.lateral_offset_m;  // source P
  const double qx = +geo.separation_m / 2.0 + geo.lateral_offset_m;  // source Q
  const auto [p_left, p_right] = project(rig, px, 0.0, z);
  const auto [q_left, q_right] = project(rig, qx, 0.0, z);

  const double radius = glare_radius_px(z);
  const double sigma = radius / 2.0;

  // Intensity assignment per pattern. Index order: [P, Q] in each camera.
  double left_i[2] = {geo.intensity_primary, geo.intensity_primary};
  double right_i[2] = {geo.intensity_primary, geo.intensity_primary};
  switch (geo.pattern) {
    case AttackPattern::XShape:
      // Q targets the left camera, P the right.
      left_i[0] = geo.intensity_secondary;
      left_i[1] = geo.intensity_primary;
      right_i[0] = geo.intensity_primary;
      right_i[1] = geo.intensity_secondary;
      break;
    case AttackPattern::Trapezoid:
      // P targets the left camera, Q the right.
      left_i[0] = geo.intensity_primary;
      left_i[1] = geo.intensity_secondary;
      right_i[0] = geo.intensity_secondary;
      right_i[1] = geo.intensity_primary;
      break;
    case AttackPattern::Triangle: {
      // Both sources target both cameras; a small deterministic jitter makes
      // one side dominate. The +-5% band is normalized by its upper edge so
      // the result never exceeds intensity_primary (peak_intensity stays in
      // (0,1] even at full primary). Jitter index order: left P, left Q,
      // right P, right Q.
      for (int i = 0; i < 4; ++i) {
        const double u = double(splitmix64(jitter_seed ^ (0xA5A5A5A5ULL + i)) >> 11) * 0x1.0p-53;
        const double factor = (0.95 + 0.10 * u) / 1.05;
        (i < 2 ? left_i : right_i)[i % 2] = geo.intensity_primary * factor;
      }
      break;
    }
  }

  const std::vector<GlareSpec> left_hits{GlareSpec{p_left, radius, left_i[0], sigma},
                                         GlareSpec{q_left, radius, left_i[1], sigma}};
  const std::vector<GlareSpec> right_hits{GlareSpec{p_right, radius, right_i[0], sigma},
                                          GlareSpec{q_right, radius, right_i[1], sigma}};

  AttackPlacement out;
  out.origin_x_px = rig.principal_x_px;
  out.origin_y_px = rig.principal_y_px;

  // Direct glares land in frame only when the sources aim at the lenses
  // (Beams / Combined); a pure orbs attack aims between them, so the frame
  // carries reflection orbs alone.
  if (geo.mode == AttackMode::Beams || geo.mode == AttackMode::Combined) {
    out.left_glares = left_hits;
    out.right_glares = right_hits;
  }

  if (geo.mode == AttackMode::Orbs || geo.mode == AttackMode::Combined) {
    // Every bright light hit spawns a centrosymmetric orb in its own camera.
    // Bright = strictly more intense than the pattern's dim level; under
    // Triangle all four jittered hits count as bright.
    const double orb_radius = radius * kOrbRadiusFactor;
    const double orb_sigma = orb_radius / 2.0;
    auto emit_orbs = [&](const std::vector<GlareSpec>& hits, std::vector<GlareSpec>& orbs) {
      for (const GlareSpec& g : hits) {
        const bool bright = geo.pattern == AttackPattern::Triangle ||
                            g.peak_intensity > geo.intensity_secondary;
        if (bright) {
          orbs.push_back(GlareSpec{orb_position(g.center), orb_radius, g.peak_intensity, orb_sigma});
        }
      }
    };
    emit_orbs(left_hits, out.left_orbs);
    emit_orbs(right_hits, out.right_orbs);
  }
  return out;
}

namespace {

struct Accum {
  std::vector<float> r, g, b;
  int w = 0, h = 0;
  explicit Accum(const ImageRgb8& base)
      : r(base.data.size()), g(base.data.size()), b(base.data.size()), w(base.width), h(base.height) {
    for (size_t i = 0; i < base.data.size(); ++i) {
      r[i] = base.data[i].r;
      g[i] = base.data[i].g;
      b[i] = base.data[i].b;
    }
  }

  void add_blob(const GlareSpec& s, double cx_px, double cy_px, bool orb) {
    const double amp = s.peak_intensity * 255.0 * (orb ? kOrbOverdrive : kGlareOverdrive);
    const double cx = cx_px + s.center.u;
    const double cy = cy_px + s.center.v;
    const double reach = 4.0 * s.sigma_px;
    const int x0 = std::max(0, int(std::floor(cx - reach)));
    const int x1 = std::min(w - 1, int(std::ceil(cx + reach)));
    const int y0 = std::max(0, int(std::floor(cy - reach)));
    const int y1 = std::min(h - 1, int(std::ceil(cy + reach)));
    const double inv2s2 = 1.0 / (2.0 * s.sigma_px * s.sigma_px);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double dx = x - cx;
        const double dy = y - cy;
        const float v = float(amp * std::exp(-(dx * dx + dy * dy) * inv2s2));
        const size_t i = size_t(y) * w + x;
        if (orb) {
          g[i] += v;
          r[i] += v * float(kOrbRedBlueRatio);
          b[i] += v * float(kOrbRedBlueRatio);
        } else {
          r[i] += v;
          g[i] += v;
          b[i] += v;
        }
      }
    }
  }

  ImageRgb8 finalize(const AutoExposure& exposure) const {
    ImageRgb8 out(w, h);
    // Clamp first, then measure the mean the AE servo would see.
    std::vector<uint8_t> cr(r.size()), cg(r.size()), cb(r.size());
    uint64_t sum = 0;
    for (size_t i = 0; i < r.size(); ++i) {
      cr[i] = uint8_t(std::clamp(std::lround(double(r[i])), 0L, 255L));
      cg[i] = uint8_t(std::clamp(std::lround(double(g[i])), 0L, 255L));
      cb[i] = uint8_t(std::clamp(std::lround(double(b[i])), 0L, 255L));
      sum += uint64_t(cr[i]) + cg[i] + cb[i];
    }
    double gain = 1.0;
    if (exposure.enabled && !r.empty()) {
      const double mean = double(sum) / (3.0 * double(r.size()) * 255.0);
      if (mean > 0.0) gain = std::min(1.0, exposure.target_mean / mean);
    }
    for (size_t i = 0; i < r.size(); ++i) {
      out.data[i] = Rgb8{uint8_t(std::lround(cr[i] * gain)), uint8_t(std::lround(cg[i] * gain)),
                         uint8_t(std::lround(cb[i] * gain))};
    }
    return out;
  }
};

}  // namespace

StereoFrame composite(const StereoFrame& frame, const AttackPlacement& placement,
                      const AutoExposure& exposure) {
  if (!frame.left.same_size(frame.right)) {
    throw GeometryError("left/right dimensions differ");
  }
  // Blob centers are principal-point-relative; the placement carries the
  // absolute origin of that coordinate system.
  const double cx = placement.origin_x_px;
  const double cy = placement.origin_y_px;

  StereoFrame out;
  out.timestamp_s = frame.timestamp_s;

  Accum left(frame.left);
  for (const auto& s : placement.left_glares) left.add_blob(s, cx, cy, false);
  for (const auto& s : placement.left_orbs) left.add_blob(s, cx, cy, true);
  out.left = left.finalize(exposure);

  Accum right(frame.right);
  for (const auto& s : placement.right_glares) right.add_blob(s, cx, cy, false);
  for (const auto& s : placement.right_orbs) right.add_blob(s, cx, cy, true);
  out.right = right.finalize(exposure);
  return out;
}

int suggested_max_disparity(const StereoRig& rig, const AttackGeometry& geo) {
  const double need =
      fake_disparity(rig, geo) + 2.0 * glare_radius_px(geo.distance_m) + 16.0;
  const int rounded = int(std::ceil(need / 16.0)) * 16;
  return std::clamp(rounded, 64, 560);
}

}  // namespace stereospoof
