#pragma once

#include <string>
#include <utility>
#include <vector>

#include "stereospoof/errors.hpp"

namespace stereospoof {

// Rectified pinhole stereo pair. Image coordinates used throughout are
// centered at the principal point: u right-positive, v down-positive, in
// pixels. The world frame is centered at the rig midpoint, x right, y down,
// z forward; optical centers sit at x = -b/2 (left) and +b/2 (right).
struct StereoRig {
  double focal_length_px = 700.0;
  double baseline_m = 0.12;
  int image_width_px = 640;
  int image_height_px = 360;
  double principal_x_px = 320.0;  // absolute pixel column of the principal point
  double principal_y_px = 180.0;  // absolute pixel row
  double pixel_pitch_m_per_px = 3e-6;

  double focal_length_m() const { return focal_length_px * pixel_pitch_m_per_px; }
  void validate() const;  // throws ConfigError
};

enum class Camera { Left, Right };

// Principal-point-relative image coordinates; may lie outside the visible frame.
struct ImagePoint {
  double u = 0.0;
  double v = 0.0;
  Camera which_camera = Camera::Left;
};

enum class AttackPattern { XShape, Trapezoid, Triangle };
enum class AttackMode { Beams, Orbs, Combined };

// Two light sources P (at x = -d/2 + offset) and Q (at x = +d/2 + offset),
// both at depth z in front of the rig.
struct AttackGeometry {
  double separation_m = 1.0;      // d, distance between the two sources
  double distance_m = 4.0;        // z, perpendicular distance to the rig
  double lateral_offset_m = 0.0;  // horizontal offset of the pair midpoint
  AttackPattern pattern = AttackPattern::XShape;
  AttackMode mode = AttackMode::Beams;
  double intensity_primary = 1.0;    // glare brightness in the targeted camera
  double intensity_secondary = 0.55; // glare brightness in the other camera

  void validate() const;  // throws ConfigError
};

enum class Feasibility { Feasible, BehindCamera, WithinFocalLength, DegenerateSeparation };
enum class FakeDepthSource { BeamsX, BeamsTrapezoid, OrbsX, OrbsTrapezoid };

struct FakeDepthPrediction {
  double depth_m = 0.0;  // signed, as produced by the closed form; NaN when degenerate
  bool exists = false;
  Feasibility reason = Feasibility::Feasible;
  FakeDepthSource source = FakeDepthSource::BeamsX;
};

const char* to_string(Feasibility r);
const char* to_string(FakeDepthSource s);
const char* to_string(AttackPattern p);
const char* to_string(AttackMode m);

// Inverses of to_string; throw DomainError on unknown names.
AttackPattern attack_pattern_from_string(const std::string& name);
AttackMode attack_mode_from_string(const std::string& name);

// depth = f*b / (left_u - right_u). Throws DisparityError on disparity <= 0.
double triangulate(const StereoRig& rig, double left_u, double right_u);

// Pinhole projection of a world point into both cameras (continuous
// coordinates, no pixel rounding). Throws BehindCameraError when z <= 0.
std::pair<ImagePoint, ImagePoint> project(const StereoRig& rig, double x, double y, double z);

// Lens-flare orb position: point reflection about the principal point,
// same camera. Involution.
ImagePoint orb_position(const ImagePoint& glare);

// Closed-form fake depths for the configured attack, one prediction per
// (mechanism, shape) combination selected by geo.mode and geo.pattern
// (Triangle selects both shapes). `exists` is false when the depth lands
// behind the camera, within the focal length, or when d == b exactly.
std::vector<FakeDepthPrediction> predict_fake_depth(const StereoRig& rig, const AttackGeometry& geo);

// Nearest multiple of step_m, ties round up, clamped to at least one step.
// Throws DomainError on non-positive inputs. Idempotent.
double round_to_oa_step(double depth_m, double step_m = 0.5);

// Disparity of the false X-shape match between the two bright glares:
// f*(d+b)/z pixels. Pure arithmetic on the fields (accepts d = 0, which
// degenerates to the true-point disparity f*b/z).
double fake_disparity(const StereoRig& rig, const AttackGeometry& geo);

}  // namespace stereospoof
