#include "stereospoof/image.hpp"

namespace stereospoof {

ImageGray8 to_gray(const ImageRgb8& img) {
  ImageGray8 out(img.width, img.height);
  for (size_t i = 0; i < img.data.size(); ++i) {
    const Rgb8 p = img.data[i];
    out.data[i] = static_cast<uint8_t>((299u * p.r + 587u * p.g + 114u * p.b + 500u) / 1000u);
  }
  return out;
}

double channel_mean(const ImageRgb8& img) {
  if (img.data.empty()) return 0.0;
  uint64_t sum = 0;
  for (const Rgb8 p : img.data) sum += uint64_t(p.r) + p.g + p.b;
  return double(sum) / (3.0 * double(img.data.size()));
}

}  // namespace stereospoof
