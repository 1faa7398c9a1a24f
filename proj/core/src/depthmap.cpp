#include "stereospoof/depthmap.hpp"

namespace stereospoof {

namespace {
constexpr float kMinDisparityPx = 0.1f;
}

size_t DepthMap::valid_count() const {
  size_t n = 0;
  for (uint8_t v : valid) n += v;
  return n;
}

DepthMap to_depth(const DisparityMap& disp, const StereoRig& rig) {
  rig.validate();
  if (disp.width != rig.image_width_px || disp.height != rig.image_height_px) {
    throw GeometryError("disparity map dimensions do not match the rig");
  }
  DepthMap out;
  out.width = disp.width;
  out.height = disp.height;
  out.rig = rig;
  out.values.assign(disp.values.size(), DepthMap::kInvalid);
  out.valid.assign(disp.values.size(), 0);
  const double fb = rig.focal_length_px * rig.baseline_m;
  for (size_t i = 0; i < disp.values.size(); ++i) {
    if (!disp.valid[i]) continue;
    const float d = disp.values[i];
    if (d <= kMinDisparityPx) continue;
    out.values[i] = float(fb / double(d));
    out.valid[i] = 1;
  }
  return out;
}

std::vector<std::array<double, 3>> to_point_cloud(const DepthMap& depth, const StereoRig& rig) {
  if (depth.width != rig.image_width_px || depth.height != rig.image_height_px) {
    throw GeometryError("depth map dimensions do not match the rig");
  }
  std::vector<std::array<double, 3>> cloud;
  cloud.reserve(depth.valid_count());
  const double f = rig.focal_length_px;
  for (int y = 0; y < depth.height; ++y) {
    for (int x = 0; x < depth.width; ++x) {
      if (!depth.valid_at(x, y)) continue;
      const double z = depth.at(x, y);
      cloud.push_back({(x - rig.principal_x_px) * z / f, (y - rig.principal_y_px) * z / f, z});
    }
  }
  return cloud;
}

Plane<float> disparity_to_pfm(const DisparityMap& disp) {
  Plane<float> img(disp.width, disp.height);
  for (size_t i = 0; i < disp.values.size(); ++i) {
    img.data[i] = disp.valid[i] ? disp.values[i] : DisparityMap::kInvalid;
  }
  return img;
}

DisparityMap pfm_to_disparity(const Plane<float>& img, int min_disparity, int max_disparity) {
  DisparityMap out;
  out.width = img.width;
  out.height = img.height;
  out.min_disparity = min_disparity;
  out.max_disparity = max_disparity;
  out.values.assign(img.data.size(), DisparityMap::kInvalid);
  out.valid.assign(img.data.size(), 0);
  for (size_t i = 0; i < img.data.size(); ++i) {
    if (img.data[i] >= 0.0f) {
      out.values[i] = img.data[i];
      out.valid[i] = 1;
    }
  }
  return out;
}

Plane<float> depth_to_pfm(const DepthMap& depth) {
  Plane<float> img(depth.width, depth.height);
  for (size_t i = 0; i < depth.values.size(); ++i) {
    img.data[i] = depth.valid[i] ? depth.values[i] : DepthMap::kInvalid;
  }
  return img;
}

DepthMap pfm_to_depth(const Plane<float>& img, const StereoRig& rig) {
  DepthMap out;
  out.width = img.width;
  out.height = img.height;
  out.rig = rig;
  out.values.assign(img.data.size(), DepthMap::kInvalid);
  out.valid.assign(img.data.size(), 0);
  for (size_t i = 0; i < img.data.size(); ++i) {
    if (img.data[i] > 0.0f) {
      out.values[i] = img.data[i];
      out.valid[i] = 1;
    }
  }
  return out;
}

}  // namespace stereospoof
