#include "stereospoof/geometry.hpp"

#include <cmath>
#include <limits>

namespace stereospoof {

void StereoRig::validate() const {
  if (!(focal_length_px > 0.0)) throw ConfigError("focal_length_px must be > 0");
  if (!(baseline_m > 0.0)) throw ConfigError("baseline_m must be > 0");
  if (image_width_px <= 0 || image_height_px <= 0) throw ConfigError("image dimensions must be > 0");
  if (!(pixel_pitch_m_per_px > 0.0)) throw ConfigError("pixel_pitch_m_per_px must be > 0");
  if (principal_x_px < 0.0 || principal_x_px > image_width_px ||
      principal_y_px < 0.0 || principal_y_px > image_height_px) {
    throw ConfigError("principal point must lie inside the image rectangle");
  }
}

void AttackGeometry::validate() const {
  if (!(separation_m > 0.0)) throw ConfigError("separation_m must be > 0");
  if (!(distance_m > 0.0)) throw ConfigError("distance_m must be > 0");
  if (!(intensity_primary > 0.0 && intensity_primary <= 1.0)) {
    throw ConfigError("intensity_primary must be in (0,1]");
  }
  if (!(intensity_secondary > 0.0 && intensity_secondary < intensity_primary)) {
    throw ConfigError("intensity_secondary must be in (0, intensity_primary)");
  }
}

const char* to_string(Feasibility r) {
  switch (r) {
    case Feasibility::Feasible: return "feasible";
    case Feasibility::BehindCamera: return "behind_camera";
    case Feasibility::WithinFocalLength: return "within_focal_length";
    case Feasibility::DegenerateSeparation: return "degenerate_separation";
  }
  return "?";
}

const char* to_string(FakeDepthSource s) {
  switch (s) {
    case FakeDepthSource::BeamsX: return "beams_x";
    case FakeDepthSource::BeamsTrapezoid: return "beams_trapezoid";
    case FakeDepthSource::OrbsX: return "orbs_x";
    case FakeDepthSource::OrbsTrapezoid: return "orbs_trapezoid";
  }
  return "?";
}

const char* to_string(AttackPattern p) {
  switch (p) {
    case AttackPattern::XShape: return "x";
    case AttackPattern::Trapezoid: return "trapezoid";
    case AttackPattern::Triangle: return "triangle";
  }
  return "?";
}

const char* to_string(AttackMode m) {
  switch (m) {
    case AttackMode::Beams: return "beams";
    case AttackMode::Orbs: return "orbs";
    case AttackMode::Combined: return "combined";
  }
  return "?";
}

AttackPattern attack_pattern_from_string(const std::string& name) {
  if (name == "x") return AttackPattern::XShape;
  if (name == "trapezoid") return AttackPattern::Trapezoid;
  if (name == "triangle") return AttackPattern::Triangle;
  throw DomainError("unknown attack pattern '" + name + "' (x, trapezoid, triangle)");
}

AttackMode attack_mode_from_string(const std::string& name) {
  if (name == "beams") return AttackMode::Beams;
  if (name == "orbs") return AttackMode::Orbs;
  if (name == "combined") return AttackMode::Combined;
  throw DomainError("unknown attack mode '" + name + "' (beams, orbs, combined)");
}

double triangulate(const StereoRig& rig, double left_u, double right_u) {
  const double disparity = left_u - right_u;
  if (!(disparity > 0.0)) {
    throw DisparityError("non-positive disparity (point at or beyond infinity)");
  }
  return rig.focal_length_px * rig.baseline_m / disparity;
}

std::pair<ImagePoint, ImagePoint> project(const StereoRig& rig, double x, double y, double z) {
  if (!(z > 0.0)) throw BehindCameraError("cannot project a point with z <= 0");
  const double f = rig.focal_length_px;
  const double half_b = rig.baseline_m / 2.0;
  ImagePoint left{f * (x + half_b) / z, f * y / z, Camera::Left};
  ImagePoint right{f * (x - half_b) / z, f * y / z, Camera::Right};
  return {left, right};
}

ImagePoint orb_position(const ImagePoint& glare) {
  return ImagePoint{-glare.u, -glare.v, glare.which_camera};
}

namespace {

// Shared existence rule: behind camera, within the focal length, or the
// separation-equals-baseline degenerate case, which voids every mechanism
// (the trapezoid denominators hit zero, so those depths are undefined).
FakeDepthPrediction classify(double depth_m, FakeDepthSource source, bool degenerate,
                             double focal_m) {
  FakeDepthPrediction p;
  p.source = source;
  p.depth_m = depth_m;
  if (degenerate) {
    p.exists = false;
    p.reason = Feasibility::DegenerateSeparation;
  } else if (depth_m <= 0.0) {
    p.exists = false;
    p.reason = Feasibility::BehindCamera;
  } else if (depth_m <= focal_m) {
    p.exists = false;
    p.reason = Feasibility::WithinFocalLength;
  } else {
    p.exists = true;
    p.reason = Feasibility::Feasible;
  }
  return p;
}

}  // namespace

std::vector<FakeDepthPrediction> predict_fake_depth(const StereoRig& rig, const AttackGeometry& geo) {
  rig.validate();
  geo.validate();

  const double b = rig.baseline_m;
  const double d = geo.separation_m;
  const double z = geo.distance_m;
  const double focal_m = rig.focal_length_m();
  const bool degenerate = (d == b);

  const bool want_beams = geo.mode == AttackMode::Beams || geo.mode == AttackMode::Combined;
  const bool want_orbs = geo.mode == AttackMode::Orbs || geo.mode == AttackMode::Combined;
  const bool want_x = geo.pattern == AttackPattern::XShape || geo.pattern == AttackPattern::Triangle;
  const bool want_trapezoid =
      geo.pattern == AttackPattern::Trapezoid || geo.pattern == AttackPattern::Triangle;

  const double undefined = std::numeric_limits<double>::quiet_NaN();

  std::vector<FakeDepthPrediction> out;
  if (want_beams && want_x) {
    out.push_back(classify((b / (d + b)) * z, FakeDepthSource::BeamsX, degenerate, focal_m));
  }
  if (want_beams && want_trapezoid) {
    const double depth = degenerate ? undefined : (b / (b - d)) * z;
    out.push_back(classify(depth, FakeDepthSource::BeamsTrapezoid, degenerate, focal_m));
  }
  if (want_orbs && want_x) {
    out.push_back(classify((-b / (d + b)) * z, FakeDepthSource::OrbsX, degenerate, focal_m));
  }
  if (want_orbs && want_trapezoid) {
    const double depth = degenerate ? undefined : (b / (d - b)) * z;
    out.push_back(classify(depth, FakeDepthSource::OrbsTrapezoid, degenerate, focal_m));
  }
  return out;
}

double round_to_oa_step(double depth_m, double step_m) {
  if (!(depth_m > 0.0)) throw DomainError("depth must be > 0");
  if (!(step_m > 0.0)) throw DomainError("step must be > 0");
  // Nearest multiple with ties up == floor(x/step + 0.5); clamp to one step.
  double k = std::floor(depth_m / step_m + 0.5);
  if (k < 1.0) k = 1.0;
  return k * step_m;
}

double fake_disparity(const StereoRig& rig, const AttackGeometry& geo) {
  return rig.focal_length_px * (geo.separation_m + rig.baseline_m) / geo.distance_m;
}

}  // namespace stereospoof
