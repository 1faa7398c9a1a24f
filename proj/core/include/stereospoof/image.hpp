#pragma once

#include <cstdint>
#include <vector>

#include "stereospoof/errors.hpp"
#include "stereospoof/geometry.hpp"

namespace stereospoof {

struct Rgb8 {
  uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb8&) const = default;
};

// Row-major pixel plane; (x, y) with y down, origin top-left.
template <typename T>
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<T> data;

  Plane() = default;
  Plane(int w, int h, T fill = T{}) : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

  T& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
  const T& at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
  bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
  bool same_size(const Plane& o) const { return width == o.width && height == o.height; }
  bool operator==(const Plane&) const = default;
};

using ImageRgb8 = Plane<Rgb8>;
using ImageGray8 = Plane<uint8_t>;

// A rectified left/right pair; both images must share dimensions.
struct StereoFrame {
  ImageRgb8 left;
  ImageRgb8 right;
  double timestamp_s = 0.0;
};

// Fixed-weight grayscale conversion, integer arithmetic:
// gray = (299*R + 587*G + 114*B + 500) / 1000.
ImageGray8 to_gray(const ImageRgb8& img);

// Mean over all channels of all pixels, in [0,255].
double channel_mean(const ImageRgb8& img);

}  // namespace stereospoof
