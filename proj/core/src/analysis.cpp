#include "stereospoof/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace stereospoof {

FakeDepthReport detect_fake_depth(const DepthMap& depth, double background_depth_m,
                                  const DetectConfig& cfg,
                                  const std::optional<FakeDepthPrediction>& predicted) {
  if (!(background_depth_m > 0.0)) throw DomainError("background depth must be > 0");
  const int W = depth.width, H = depth.height;

  // Deviating = valid and off the background by more than the fraction.
  std::vector<uint8_t> deviating(size_t(W) * H, 0);
  for (size_t i = 0; i < deviating.size(); ++i) {
    if (!depth.valid[i]) continue;
    const double rel = std::abs(depth.values[i] - background_depth_m) / background_depth_m;
    deviating[i] = rel > cfg.deviation_frac ? 1 : 0;
  }

  // Largest 4-connected component by flood fill.
  std::vector<int32_t> label(size_t(W) * H, -1);
  std::vector<size_t> best_pixels;
  std::vector<size_t> stack, pixels;
  int32_t next_label = 0;
  for (size_t start = 0; start < deviating.size(); ++start) {
    if (!deviating[start] || label[start] >= 0) continue;
    pixels.clear();
    stack.assign(1, start);
    label[start] = next_label;
    while (!stack.empty()) {
      const size_t i = stack.back();
      stack.pop_back();
      pixels.push_back(i);
      const int x = int(i % W), y = int(i / W);
      const int nx[4] = {x - 1, x + 1, x, x};
      const int ny[4] = {y, y, y - 1, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || nx[k] >= W || ny[k] < 0 || ny[k] >= H) continue;
        const size_t j = size_t(ny[k]) * W + nx[k];
        if (deviating[j] && label[j] < 0) {
          label[j] = next_label;
          stack.push_back(j);
        }
      }
    }
    ++next_label;
    if (pixels.size() > best_pixels.size()) best_pixels = pixels;
  }

  FakeDepthReport report;
  report.predicted = predicted;
  if (double(best_pixels.size()) >= cfg.min_blob_area_px && !best_pixels.empty()) {
    report.detected = true;
    report.blob_area_px = double(best_pixels.size());
    double su = 0.0, sv = 0.0;
    std::vector<float> depths;
    depths.reserve(best_pixels.size());
    for (const size_t i : best_pixels) {
      su += double(i % W);
      sv += double(i / W);
      depths.push_back(depth.values[i]);
    }
    report.blob_center =
        ImagePoint{su / double(best_pixels.size()) - depth.rig.principal_x_px,
                   sv / double(best_pixels.size()) - depth.rig.principal_y_px, Camera::Left};
    // Median, lower-middle for even counts (deterministic).
    const size_t mid = (depths.size() - 1) / 2;
    std::nth_element(depths.begin(), depths.begin() + mid, depths.end());
    report.measured_depth_m = double(depths[mid]);
    report.success = report.measured_depth_m < cfg.oa_threshold_m;
  }
  if (report.detected && predicted.has_value() && std::isfinite(predicted->depth_m) &&
      predicted->depth_m != 0.0) {
    report.relative_error =
        std::abs(report.measured_depth_m - predicted->depth_m) / std::abs(predicted->depth_m);
  }
  return report;
}

const char* to_string(SaturationVerdict v) {
  return v == SaturationVerdict::Clean ? "clean" : "suspect";
}

SaturationReport detect_saturation(const StereoFrame& frame, int sat_level,
                                   double frac_threshold) {
  if (sat_level <= 0 || sat_level > 255) throw DomainError("sat_level must be in (0,255]");
  SaturationReport report;
  auto scan = [&](const ImageRgb8& img, ImageGray8& mask) -> double {
    mask = ImageGray8(img.width, img.height, 0);
    size_t flagged = 0;
    for (size_t i = 0; i < img.data.size(); ++i) {
      const Rgb8 p = img.data[i];
      if (p.r >= sat_level && p.g >= sat_level && p.b >= sat_level) {
        mask.data[i] = 1;
        ++flagged;
      }
    }
    return img.data.empty() ? 0.0 : double(flagged) / double(img.data.size());
  };
  report.left_fraction = scan(frame.left, report.left_mask);
  report.right_fraction = scan(frame.right, report.right_mask);
  report.verdict = (report.left_fraction > frac_threshold || report.right_fraction > frac_threshold)
                       ? SaturationVerdict::Suspect
                       : SaturationVerdict::Clean;
  return report;
}

namespace {

// Expected-value rounding for the far-mechanism column: below two steps the
// display value rounds up to the next step; at or above, to the nearest step.
double round_expected_far(double raw_m, double step_m) {
  if (raw_m < 2.0 * step_m) {
    double k = std::ceil(raw_m / step_m);
    if (k < 1.0) k = 1.0;
    return k * step_m;
  }
  return round_to_oa_step(raw_m, step_m);
}

}  // namespace

std::vector<ExpectedRow> expected_table(const StereoRig& rig, double separation_m,
                                        const std::vector<double>& distances_m, double step_m) {
  rig.validate();
  if (!(separation_m > 0.0)) throw DomainError("separation must be > 0");
  if (!(step_m > 0.0)) throw DomainError("step must be > 0");
  const double b = rig.baseline_m;
  const double d = separation_m;

  std::vector<ExpectedRow> rows;
  rows.reserve(distances_m.size());
  for (const double z : distances_m) {
    if (!(z > 0.0)) throw DomainError("distances must be > 0");
    ExpectedRow row;
    row.distance_m = z;
    row.x_raw_m = (b / (d + b)) * z;
    row.x_expected_m = round_to_oa_step(row.x_raw_m, step_m);
    // Only one far mechanism is feasible per regime: the crossed-glare far
    // form needs b > d, the orb-pair form needs d > b.
    if (d == b) {
      row.trapezoid_raw_m = std::numeric_limits<double>::quiet_NaN();
      row.trapezoid_expected_m = std::numeric_limits<double>::quiet_NaN();
      row.trapezoid_source = FakeDepthSource::BeamsTrapezoid;
      row.trapezoid_exists = false;
    } else if (b > d) {
      row.trapezoid_raw_m = (b / (b - d)) * z;
      row.trapezoid_source = FakeDepthSource::BeamsTrapezoid;
      row.trapezoid_exists = true;
      row.trapezoid_expected_m = round_expected_far(row.trapezoid_raw_m, step_m);
    } else {
      row.trapezoid_raw_m = (b / (d - b)) * z;
      row.trapezoid_source = FakeDepthSource::OrbsTrapezoid;
      row.trapezoid_exists = true;
      row.trapezoid_expected_m = round_expected_far(row.trapezoid_raw_m, step_m);
    }
    rows.push_back(row);
  }
  return rows;
}

std::string report_to_kv(const FakeDepthReport& report) {
  char buf[256];
  std::string out;
  auto add = [&](const char* key, const char* fmt, auto value) {
    std::snprintf(buf, sizeof buf, fmt, value);
    out += key;
    out += '=';
    out += buf;
    out += '\n';
  };
  add("detected", "%s", report.detected ? "true" : "false");
  if (report.detected) {
    add("blob_center_u_px", "%.3f", report.blob_center.u);
    add("blob_center_v_px", "%.3f", report.blob_center.v);
    add("blob_area_px", "%.0f", report.blob_area_px);
    add("measured_depth_m", "%.4f", report.measured_depth_m);
  }
  if (report.predicted.has_value()) {
    const FakeDepthPrediction& p = *report.predicted;
    add("predicted_source", "%s", to_string(p.source));
    if (std::isfinite(p.depth_m)) add("predicted_depth_m", "%.4f", p.depth_m);
    add("predicted_exists", "%s", p.exists ? "true" : "false");
    add("predicted_reason", "%s", to_string(p.reason));
    if (report.detected) add("relative_error", "%.4f", report.relative_error);
  }
  add("success", "%s", report.success ? "true" : "false");
  return out;
}

std::string expected_table_to_csv(const std::vector<ExpectedRow>& rows) {
  std::string out = "distance_m,x_raw_m,x_expected_m,trapezoid_raw_m,trapezoid_expected_m,"
                    "trapezoid_source,trapezoid_exists\n";
  char buf[256];
  for (const ExpectedRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%g,%.6f,%g,", r.distance_m, r.x_raw_m, r.x_expected_m);
    out += buf;
    if (std::isfinite(r.trapezoid_raw_m)) {
      std::snprintf(buf, sizeof buf, "%.6f,%g,", r.trapezoid_raw_m, r.trapezoid_expected_m);
    } else {
      std::snprintf(buf, sizeof buf, "n/a,n/a,");
    }
    out += buf;
    out += to_string(r.trapezoid_source);
    out += r.trapezoid_exists ? ",true\n" : ",false\n";
  }
  return out;
}

}  // namespace stereospoof
