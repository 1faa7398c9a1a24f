#include "stereospoof/matching.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

namespace stereospoof {

namespace {

constexpr int kCensusRadius = 2;  // 5x5 census window
constexpr uint8_t kInvalidCost = 64;  // above any real Hamming cost (max 24)

}  // namespace

const char* to_string(MatchAlgorithm a) {
  return a == MatchAlgorithm::BlockSAD ? "block_sad" : "sgm";
}

MatchAlgorithm match_algorithm_from_string(const std::string& name) {
  if (name == "block_sad") return MatchAlgorithm::BlockSAD;
  if (name == "sgm") return MatchAlgorithm::SemiGlobal;
  throw DomainError("unknown match algorithm '" + name + "' (block_sad, sgm)");
}

void MatcherConfig::validate(int image_width, int image_height) const {
  if (algorithm == MatchAlgorithm::BlockSAD) {
    if (block_size < 3 || block_size % 2 == 0) throw ConfigError("block_size must be odd and >= 3");
    if (block_size > image_width || block_size > image_height) {
      throw ConfigError("block larger than image");
    }
  } else {
    if (2 * kCensusRadius + 1 > image_width || 2 * kCensusRadius + 1 > image_height) {
      throw ConfigError("image smaller than the census window");
    }
  }
  if (min_disparity < 0) throw ConfigError("min_disparity must be >= 0");
  if (max_disparity <= min_disparity) throw ConfigError("max_disparity must exceed min_disparity");
  if (sgm_p1 < 0 || sgm_p2 < sgm_p1) throw ConfigError("penalties must satisfy 0 <= p1 <= p2");
  // Aggregated sums are uint16: 8 paths x (cost + p2) must fit.
  if (sgm_p2 > 8000) throw ConfigError("sgm_p2 too large for the cost scale (max 8000)");
  if (uniqueness_ratio < 1.0) throw ConfigError("uniqueness_ratio must be >= 1.0");
}

size_t DisparityMap::valid_count() const {
  size_t n = 0;
  for (uint8_t v : valid) n += v;
  return n;
}

namespace {

// Shared winner-take-all + filtering for one image row. `cost(dd, x)` reads
// the matching cost of left pixel x at disparity candidate index dd (actual
// disparity = min_d + dd); it must be valid for border <= x < W-border and
// min_d + dd <= x - border.
template <typename CostFn>
void postprocess_row(CostFn cost, int y, int W, int border, int min_d, int dcount,
                     const MatcherConfig& cfg, DisparityMap& out) {
  std::vector<int> bestd(W, -1);
  std::vector<uint32_t> bestc(W, 0);

  auto max_dd = [&](int x) { return std::min(dcount - 1, x - border - min_d); };

  for (int x = border; x < W - border; ++x) {
    const int dmax = max_dd(x);
    if (dmax < 0) continue;
    uint32_t bc = std::numeric_limits<uint32_t>::max();
    int bd = -1;
    for (int dd = 0; dd <= dmax; ++dd) {
      const uint32_t c = cost(dd, x);
      if (c < bc) {  // strict: ties stay with the smallest disparity
        bc = c;
        bd = dd;
      }
    }
    bestd[x] = bd;
    bestc[x] = bc;
  }

  // Right-image winners from the same cost volume: cost_R(xr, d) = cost(xr + d, d).
  std::vector<int> rbest;
  if (cfg.lr_consistency_px >= 0.0) {
    rbest.assign(W, -1);
    for (int xr = border; xr < W - border; ++xr) {
      uint32_t bc = std::numeric_limits<uint32_t>::max();
      int bd = -1;
      for (int dd = 0; dd < dcount; ++dd) {
        const int xl = xr + min_d + dd;
        if (xl >= W - border) break;
        const uint32_t c = cost(dd, xl);
        if (c < bc) {
          bc = c;
          bd = dd;
        }
      }
      rbest[xr] = bd;
    }
  }

  for (int x = border; x < W - border; ++x) {
    const int bd = bestd[x];
    if (bd < 0) continue;
    const int d = min_d + bd;

    if (cfg.uniqueness_ratio >= 1.0) {
      // The winner (scaled by the ratio) must beat the best candidate at
      // least 2 px away, else the pixel is ambiguous.
      const int dmax = max_dd(x);
      uint32_t second = std::numeric_limits<uint32_t>::max();
      for (int dd = 0; dd <= dmax; ++dd) {
        if (dd >= bd - 1 && dd <= bd + 1) continue;
        const uint32_t c = cost(dd, x);
        if (c < second) second = c;
      }
      if (second != std::numeric_limits<uint32_t>::max() &&
          !(double(bestc[x]) * cfg.uniqueness_ratio < double(second))) {
        continue;
      }
    }

    if (cfg.lr_consistency_px >= 0.0) {
      const int xr = x - d;
      if (xr < border || xr >= W - border || rbest[xr] < 0) continue;
      if (std::abs(double(min_d + rbest[xr]) - double(d)) > cfg.lr_consistency_px) continue;
    }

    double value = d;
    if (cfg.subpixel) {
      const int dmax = max_dd(x);
      if (bd > 0 && bd < dmax) {
        const double cm = cost(bd - 1, x);
        const double c0 = bestc[x];
        const double cp = cost(bd + 1, x);
        const double denom = cm + cp - 2.0 * c0;  // >= 0 at a minimum
        if (denom > 0.0) {
          value += std::clamp((cm - cp) / (2.0 * denom), -0.5, 0.5);
        }
      }
    }

    const size_t i = size_t(y) * W + x;
    out.values[i] = float(value);
    out.valid[i] = 1;
  }
}

DisparityMap match_block_sad(const ImageGray8& left, const ImageGray8& right,
                             const MatcherConfig& cfg) {
  const int W = left.width, H = left.height;
  const int half = cfg.block_size / 2;
  const int min_d = cfg.min_disparity;
  const int D = cfg.max_disparity - cfg.min_disparity;

  DisparityMap out;
  out.width = W;
  out.height = H;
  out.min_disparity = cfg.min_disparity;
  out.max_disparity = cfg.max_disparity;
  out.values.assign(size_t(W) * H, DisparityMap::kInvalid);
  out.valid.assign(size_t(W) * H, 0);

  // colsum[dd][x]: vertical window sum of |L(x, .) - R(x-d, .)|, slid row by
  // row; costrow[dd][x]: horizontal box sum of colsum = full block SAD.
  std::vector<uint16_t> colsum(size_t(D) * W, 0);
  std::vector<uint32_t> costrow(size_t(D) * W, std::numeric_limits<uint32_t>::max());

  auto absdiff = [&](int x, int y, int d) -> int {
    return std::abs(int(left.at(x, y)) - int(right.at(x - d, y)));
  };

  for (int y = half; y < H - half; ++y) {
    if (y == half) {
      std::fill(colsum.begin(), colsum.end(), 0);
      for (int dd = 0; dd < D; ++dd) {
        const int d = min_d + dd;
        uint16_t* cs = &colsum[size_t(dd) * W];
        for (int yy = 0; yy < cfg.block_size; ++yy) {
          for (int x = d; x < W; ++x) cs[x] = uint16_t(cs[x] + absdiff(x, yy, d));
        }
      }
    } else {
      const int y_in = y + half;
      const int y_out = y - half - 1;
      for (int dd = 0; dd < D; ++dd) {
        const int d = min_d + dd;
        uint16_t* cs = &colsum[size_t(dd) * W];
        for (int x = d; x < W; ++x) {
          cs[x] = uint16_t(cs[x] + absdiff(x, y_in, d) - absdiff(x, y_out, d));
        }
      }
    }

    for (int dd = 0; dd < D; ++dd) {
      const int d = min_d + dd;
      const int x0 = d + half;
      if (x0 >= W - half) continue;
      const uint16_t* cs = &colsum[size_t(dd) * W];
      uint32_t* cr = &costrow[size_t(dd) * W];
      uint32_t s = 0;
      for (int xx = x0 - half; xx <= x0 + half; ++xx) s += cs[xx];
      cr[x0] = s;
      for (int x = x0 + 1; x < W - half; ++x) {
        s += cs[x + half];
        s -= cs[x - half - 1];
        cr[x] = s;
      }
    }

    postprocess_row([&](int dd, int x) { return costrow[size_t(dd) * W + x]; }, y, W, half,
                    min_d, D, cfg, out);
  }
  return out;
}

// 24-bit census code of the 5x5 neighborhood (bit = neighbor strictly darker
// than the center), raster order, center skipped. Border pixels keep code 0.
std::vector<uint32_t> census_transform(const ImageGray8& img) {
  const int W = img.width, H = img.height;
  std::vector<uint32_t> codes(size_t(W) * H, 0);
  for (int y = kCensusRadius; y < H - kCensusRadius; ++y) {
    for (int x = kCensusRadius; x < W - kCensusRadius; ++x) {
      const uint8_t c = img.at(x, y);
      uint32_t code = 0;
      for (int dy = -kCensusRadius; dy <= kCensusRadius; ++dy) {
        for (int dx = -kCensusRadius; dx <= kCensusRadius; ++dx) {
          if (dx == 0 && dy == 0) continue;
          code = (code << 1) | uint32_t(img.at(x + dx, y + dy) < c);
        }
      }
      codes[size_t(y) * W + x] = code;
    }
  }
  return codes;
}

// One directional sweep of the semi-global aggregation; adds the four path
// costs of this sweep into S. forward: rows top-down, pixels left-to-right,
// paths from the left / up-left / up / up-right predecessors. backward: the
// mirrored four.
void aggregate_pass(const uint8_t* C, uint16_t* S, int W, int H, int D, int P1, int P2,
                    bool forward) {
  constexpr uint16_t kInf = 60000;
  const size_t row_stride = size_t(W) * D;

  // Rolling buffers: one in-row path plus three cross-row paths with full
  // previous-row storage. Arrays are padded by one slot on each disparity
  // side so the d+-1 lookups need no branches.
  const int padD = D + 2;
  std::vector<uint16_t> inrow_prev(padD, kInf), inrow_cur(padD, kInf);
  std::vector<std::vector<uint16_t>> prev_rows(3), cur_rows(3);
  std::vector<std::vector<uint16_t>> prev_mins(3), cur_mins(3);
  for (int p = 0; p < 3; ++p) {
    prev_rows[p].assign(size_t(W) * padD, kInf);
    cur_rows[p].assign(size_t(W) * padD, kInf);
    prev_mins[p].assign(W, kInf);
    cur_mins[p].assign(W, kInf);
  }

  const int y0 = forward ? 0 : H - 1;
  const int y_end = forward ? H : -1;
  const int y_step = forward ? 1 : -1;
  const int x0 = forward ? 0 : W - 1;
  const int x_end = forward ? W : -1;
  const int x_step = forward ? 1 : -1;
  // Cross-row predecessor column offsets (relative to x) for the three paths.
  const int pdx[3] = {0, -x_step, +x_step};

  for (int y = y0; y != y_end; y += y_step) {
    const bool first_row = (y == y0);
    uint16_t inrow_min = kInf;
    bool inrow_has_prev = false;

    for (int x = x0; x != x_end; x += x_step) {
      const uint8_t* c = C + size_t(y) * row_stride + size_t(x) * D;
      uint16_t* s = S + size_t(y) * row_stride + size_t(x) * D;

      // In-row path.
      {
        uint16_t newmin = kInf;
        if (!inrow_has_prev) {
          for (int d = 0; d < D; ++d) {
            const uint16_t v = c[d];
            inrow_cur[d + 1] = v;
            s[d] = uint16_t(s[d] + v);
            newmin = std::min(newmin, v);
          }
        } else {
          const uint16_t* Lp = inrow_prev.data();
          const int base = inrow_min;
          const int cap = base + P2;
          for (int d = 0; d < D; ++d) {
            int m = Lp[d + 1];
            m = std::min(m, std::min(int(Lp[d]), int(Lp[d + 2])) + P1);
            m = std::min(m, cap);
            const uint16_t v = uint16_t(c[d] + m - base);
            inrow_cur[d + 1] = v;
            s[d] = uint16_t(s[d] + v);
            newmin = std::min(newmin, v);
          }
        }
        std::swap(inrow_prev, inrow_cur);
        inrow_min = newmin;
        inrow_has_prev = true;
      }

      // Cross-row paths.
      for (int p = 0; p < 3; ++p) {
        const int xp = x + pdx[p];
        uint16_t newmin = kInf;
        uint16_t* cur = &cur_rows[p][size_t(x) * padD];
        if (first_row || xp < 0 || xp >= W) {
          for (int d = 0; d < D; ++d) {
            const uint16_t v = c[d];
            cur[d + 1] = v;
            s[d] = uint16_t(s[d] + v);
            newmin = std::min(newmin, v);
          }
        } else {
          const uint16_t* Lp = &prev_rows[p][size_t(xp) * padD];
          const int base = prev_mins[p][xp];
          const int cap = base + P2;
          for (int d = 0; d < D; ++d) {
            int m = Lp[d + 1];
            m = std::min(m, std::min(int(Lp[d]), int(Lp[d + 2])) + P1);
            m = std::min(m, cap);
            const uint16_t v = uint16_t(c[d] + m - base);
            cur[d + 1] = v;
            s[d] = uint16_t(s[d] + v);
            newmin = std::min(newmin, v);
          }
        }
        cur_mins[p][x] = newmin;
      }
    }

    for (int p = 0; p < 3; ++p) {
      std::swap(prev_rows[p], cur_rows[p]);
      std::swap(prev_mins[p], cur_mins[p]);
    }
  }
}

DisparityMap match_semi_global(const ImageGray8& left, const ImageGray8& right,
                               const MatcherConfig& cfg) {
  const int W = left.width, H = left.height;
  const int border = kCensusRadius;
  const int min_d = cfg.min_disparity;
  const int D = cfg.max_disparity - cfg.min_disparity;

  DisparityMap out;
  out.width = W;
  out.height = H;
  out.min_disparity = cfg.min_disparity;
  out.max_disparity = cfg.max_disparity;
  out.values.assign(size_t(W) * H, DisparityMap::kInvalid);
  out.valid.assign(size_t(W) * H, 0);

  const std::vector<uint32_t> cl = census_transform(left);
  const std::vector<uint32_t> cr = census_transform(right);

  std::vector<uint8_t> C(size_t(W) * H * D, kInvalidCost);
  for (int y = border; y < H - border; ++y) {
    for (int x = border; x < W - border; ++x) {
      const uint32_t code = cl[size_t(y) * W + x];
      uint8_t* cost = &C[(size_t(y) * W + x) * D];
      const int dmax = std::min(D - 1, x - border - min_d);
      for (int dd = 0; dd <= dmax; ++dd) {
        cost[dd] = uint8_t(std::popcount(code ^ cr[size_t(y) * W + (x - min_d - dd)]));
      }
    }
  }

  std::vector<uint16_t> S(size_t(W) * H * D, 0);
  aggregate_pass(C.data(), S.data(), W, H, D, cfg.sgm_p1, cfg.sgm_p2, true);
  aggregate_pass(C.data(), S.data(), W, H, D, cfg.sgm_p1, cfg.sgm_p2, false);

  for (int y = border; y < H - border; ++y) {
    const uint16_t* srow = &S[size_t(y) * W * D];
    postprocess_row([&](int dd, int x) { return uint32_t(srow[size_t(x) * D + dd]); }, y, W,
                    border, min_d, D, cfg, out);
  }
  return out;
}

}  // namespace

DisparityMap match_gray(const ImageGray8& left, const ImageGray8& right, const MatcherConfig& cfg) {
  if (!left.same_size(right)) throw GeometryError("left/right dimensions differ");
  cfg.validate(left.width, left.height);
  if (cfg.algorithm == MatchAlgorithm::BlockSAD) return match_block_sad(left, right, cfg);
  return match_semi_global(left, right, cfg);
}

DisparityMap match(const StereoFrame& frame, const MatcherConfig& cfg) {
  if (!frame.left.same_size(frame.right)) throw GeometryError("left/right dimensions differ");
  return match_gray(to_gray(frame.left), to_gray(frame.right), cfg);
}

}  // namespace stereospoof
