#pragma once

// Exhaustive reference matchers, written directly from the cost definitions
// with no shared code or shortcuts. Deliberately O(W*H*D*block^2) so the
// production matcher's incremental sums have an independent ground truth.

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <vector>

#include "stereospoof/image.hpp"

namespace oracle {

struct WtaResult {
  int width = 0;
  int height = 0;
  std::vector<int> disparity;  // -1 where no candidate window fits
};

// Pure block-SAD winner-take-all: a candidate disparity d is admissible when
// both block windows lie fully inside their images; ties keep the smallest d.
inline WtaResult block_sad(const stereospoof::ImageGray8& left,
                           const stereospoof::ImageGray8& right, int block_size, int min_disp,
                           int max_disp) {
  const int W = left.width, H = left.height, half = block_size / 2;
  WtaResult out{W, H, std::vector<int>(static_cast<size_t>(W) * H, -1)};
  for (int y = half; y < H - half; ++y) {
    for (int x = half; x < W - half; ++x) {
      long best_cost = std::numeric_limits<long>::max();
      int best_d = -1;
      for (int d = min_disp; d < max_disp; ++d) {
        if (x - d - half < 0) break;
        long cost = 0;
        for (int dy = -half; dy <= half; ++dy) {
          for (int dx = -half; dx <= half; ++dx) {
            cost += std::abs(int(left.at(x + dx, y + dy)) - int(right.at(x - d + dx, y + dy)));
          }
        }
        if (cost < best_cost) {
          best_cost = cost;
          best_d = d;
        }
      }
      out.disparity[static_cast<size_t>(y) * W + x] = best_d;
    }
  }
  return out;
}

// 5x5 census (bit = neighbor strictly darker than the center, raster order,
// center skipped) + Hamming winner-take-all, same admissibility and tie rule.
inline WtaResult census_wta(const stereospoof::ImageGray8& left,
                            const stereospoof::ImageGray8& right, int min_disp, int max_disp) {
  const int W = left.width, H = left.height, r = 2;
  auto census = [&](const stereospoof::ImageGray8& img, int x, int y) {
    uint32_t code = 0;
    const uint8_t c = img.at(x, y);
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        if (dx == 0 && dy == 0) continue;
        code = (code << 1) | uint32_t(img.at(x + dx, y + dy) < c);
      }
    }
    return code;
  };
  WtaResult out{W, H, std::vector<int>(static_cast<size_t>(W) * H, -1)};
  for (int y = r; y < H - r; ++y) {
    for (int x = r; x < W - r; ++x) {
      const uint32_t cl = census(left, x, y);
      int best_cost = std::numeric_limits<int>::max();
      int best_d = -1;
      for (int d = min_disp; d < max_disp; ++d) {
        if (x - d - r < 0) break;
        const int cost = std::popcount(cl ^ census(right, x - d, y));
        if (cost < best_cost) {
          best_cost = cost;
          best_d = d;
        }
      }
      out.disparity[static_cast<size_t>(y) * W + x] = best_d;
    }
  }
  return out;
}

// Deterministic texture helper for matcher tests: splitmix64 per pixel.
inline stereospoof::ImageGray8 random_texture(int width, int height, uint64_t seed) {
  stereospoof::ImageGray8 img(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      uint64_t v = seed * 0x9e3779b97f4a7c15ULL + (uint64_t(y) << 32 | uint64_t(uint32_t(x)));
      v ^= v >> 30;
      v *= 0xbf58476d1ce4e5b9ULL;
      v ^= v >> 27;
      v *= 0x94d049bb133111ebULL;
      v ^= v >> 31;
      img.at(x, y) = uint8_t(v & 0xff);
    }
  }
  return img;
}

// Constant-disparity pair: left(x) == right(x - shift) everywhere, i.e. the
// shared texture sits `shift` px further left in the right image. The base
// is wider than the output so every pixel stays textured.
inline std::pair<stereospoof::ImageGray8, stereospoof::ImageGray8> shifted_pair(int width,
                                                                                int height,
                                                                                int shift,
                                                                                uint64_t seed) {
  stereospoof::ImageGray8 base = random_texture(width + shift, height, seed);
  stereospoof::ImageGray8 left(width, height), right(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      left.at(x, y) = base.at(x, y);
      right.at(x, y) = base.at(x + shift, y);
    }
  }
  return {left, right};
}

}  // namespace oracle
