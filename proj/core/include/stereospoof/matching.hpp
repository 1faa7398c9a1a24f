#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stereospoof/image.hpp"

namespace stereospoof {

enum class MatchAlgorithm { BlockSAD, SemiGlobal };

const char* to_string(MatchAlgorithm a);  // "block_sad" / "sgm"
MatchAlgorithm match_algorithm_from_string(const std::string& name);  // throws DomainError

// Disparity candidates are d in [min_disparity, max_disparity) — half-open,
// so a range of 16 means candidates 0..15.
struct MatcherConfig {
  MatchAlgorithm algorithm = MatchAlgorithm::SemiGlobal;
  int block_size = 11;     // BlockSAD window (odd, >= 3); SemiGlobal uses a fixed 5x5 census
  int min_disparity = 0;
  int max_disparity = 64;
  int sgm_p1 = 8;          // penalty for +-1 disparity change along a path
  int sgm_p2 = 20;         // penalty for larger changes (> p1); kept below the
                           // 24-bit census cost ceiling so small high-contrast
                           // regions can still assert their own disparity
  double uniqueness_ratio = 1.0;   // valid iff best*ratio < second_best (strict)
  double lr_consistency_px = 1.0;  // max |d_L - d_R| allowed; negative = check off
  bool subpixel = true;            // parabolic refinement of the integer winner

  void validate(int image_width, int image_height) const;  // throws ConfigError
};

struct DisparityMap {
  int width = 0;
  int height = 0;
  std::vector<float> values;   // kInvalid where !valid
  std::vector<uint8_t> valid;
  int min_disparity = 0;
  int max_disparity = 0;

  static constexpr float kInvalid = -1.0f;

  float at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
  bool valid_at(int x, int y) const { return valid[static_cast<size_t>(y) * width + x] != 0; }
  size_t valid_count() const;
};

// Dense stereo correspondence on the grayscale conversions of the pair.
// BlockSAD: per-pixel argmin of sum-of-absolute-differences over the block,
// ties toward the smallest disparity, block-border pixels invalid.
// SemiGlobal: 5x5 census transform, Hamming costs, dynamic-programming
// aggregation along 8 paths with penalties p1/p2, winner-take-all on the
// summed costs, same tie-break, census-border pixels invalid.
// Both then apply the uniqueness filter (second-best taken >= 2 px away from
// the winner), optional parabolic sub-pixel refinement (never moves the
// winner by more than 0.5 px), and left-right consistency invalidation.
DisparityMap match(const StereoFrame& frame, const MatcherConfig& cfg);
DisparityMap match_gray(const ImageGray8& left, const ImageGray8& right, const MatcherConfig& cfg);

}  // namespace stereospoof
