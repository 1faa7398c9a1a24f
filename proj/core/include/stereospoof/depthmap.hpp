#pragma once

#include <array>
#include <vector>

#include "stereospoof/geometry.hpp"
#include "stereospoof/matching.hpp"

namespace stereospoof {

struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<float> values;   // meters; kInvalid where !valid
  std::vector<uint8_t> valid;
  StereoRig rig;

  static constexpr float kInvalid = 0.0f;  // valid depths are strictly positive

  float at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
  bool valid_at(int x, int y) const { return valid[static_cast<size_t>(y) * width + x] != 0; }
  size_t valid_count() const;
};

// Per-pixel triangulation depth = f*b/disparity. Disparities <= 0.1 px are
// marked invalid (near-infinity cutoff). Throws GeometryError when the rig's
// dimensions disagree with the map's.
DepthMap to_depth(const DisparityMap& disp, const StereoRig& rig);

// Back-projects every valid pixel through the pinhole model into the
// left-camera frame (x right, y down, z forward; the principal ray of the
// left camera is x = y = 0).
std::vector<std::array<double, 3>> to_point_cloud(const DepthMap& depth, const StereoRig& rig);

// PFM adapters (see image_io.hpp for the sentinel conventions).
Plane<float> disparity_to_pfm(const DisparityMap& disp);
DisparityMap pfm_to_disparity(const Plane<float>& img, int min_disparity, int max_disparity);
Plane<float> depth_to_pfm(const DepthMap& depth);
DepthMap pfm_to_depth(const Plane<float>& img, const StereoRig& rig);

}  // namespace stereospoof
