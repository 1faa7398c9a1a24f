#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stereospoof/depthmap.hpp"
#include "stereospoof/geometry.hpp"
#include "stereospoof/image.hpp"

namespace stereospoof {

struct DetectConfig {
  double deviation_frac = 0.30;    // blob pixels deviate from background by more than this
  double min_blob_area_px = 25.0;  // smallest reportable component, px^2
  double oa_threshold_m = 6.0;     // obstacle-avoidance trigger depth
};

struct FakeDepthReport {
  bool detected = false;
  ImagePoint blob_center;       // centroid, principal-point-relative, left camera
  double blob_area_px = 0.0;
  double measured_depth_m = 0.0;  // median depth over the blob
  std::optional<FakeDepthPrediction> predicted;
  double relative_error = 0.0;  // |measured - predicted| / |predicted|, when predicted
  bool success = false;         // detected && measured < oa_threshold_m
};

// Finds the largest 4-connected component of valid pixels whose depth
// deviates from the scene background by more than deviation_frac, measures
// its median depth, and evaluates the obstacle-avoidance success rule.
// When a prediction is supplied the relative error is filled in.
FakeDepthReport detect_fake_depth(const DepthMap& depth, double background_depth_m,
                                  const DetectConfig& cfg = {},
                                  const std::optional<FakeDepthPrediction>& predicted = {});

enum class SaturationVerdict { Clean, Suspect };

const char* to_string(SaturationVerdict v);  // "clean" / "suspect"

struct SaturationReport {
  ImageGray8 left_mask;   // 1 where all channels >= sat_level
  ImageGray8 right_mask;
  double left_fraction = 0.0;
  double right_fraction = 0.0;
  SaturationVerdict verdict = SaturationVerdict::Clean;
};

// Over-saturation screen: flags pixels whose channels are all >= sat_level;
// Suspect when the flagged fraction of either camera exceeds frac_threshold.
SaturationReport detect_saturation(const StereoFrame& frame, int sat_level = 250,
                                   double frac_threshold = 0.002);

struct ExpectedRow {
  double distance_m = 0.0;       // z
  double x_raw_m = 0.0;          // near-mechanism (crossed bright pair) closed form
  double x_expected_m = 0.0;     // rounded to the OA display step
  double trapezoid_raw_m = 0.0;  // far-mechanism closed form (NaN when degenerate)
  double trapezoid_expected_m = 0.0;
  FakeDepthSource trapezoid_source = FakeDepthSource::OrbsTrapezoid;
  bool trapezoid_exists = false;
};

// Expected fake-depth table over source distances for a fixed separation d:
// the X column from the crossed-pair formula, the Trapezoid column from
// whichever far mechanism is feasible for the d/b regime.
std::vector<ExpectedRow> expected_table(const StereoRig& rig, double separation_m,
                                        const std::vector<double>& distances_m,
                                        double step_m = 0.5);

// Line-oriented key=value serialization of a report.
std::string report_to_kv(const FakeDepthReport& report);

// CSV serialization of the expected table (header + one row per distance).
std::string expected_table_to_csv(const std::vector<ExpectedRow>& rows);

}  // namespace stereospoof
