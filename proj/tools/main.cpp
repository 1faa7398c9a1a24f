#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "stereospoof/analysis.hpp"
#include "stereospoof/depthmap.hpp"
#include "stereospoof/flightsim.hpp"
#include "stereospoof/geometry.hpp"
#include "stereospoof/image_io.hpp"
#include "stereospoof/matching.hpp"
#include "stereospoof/render.hpp"

using namespace stereospoof;
using nlohmann::json;

namespace {

// Exit codes: 0 = ran, 1 = IO failure, 2 = usage or parse failure.
int run_guarded(const std::function<int()>& fn) {
  try {
    return fn();
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

// --out wins over the STEREOSPOOF_OUT environment variable, which wins over
// the working directory.
std::string resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  const char* env = std::getenv("STEREOSPOOF_OUT");
  if (env != nullptr && *env != '\0') return env;
  return ".";
}

std::string prepare_out_path(const std::string& dir, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
  return (std::filesystem::path(dir) / name).string();
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  out.close();
  if (!out) throw IoError("write failed: " + path);
}

BackgroundKind background_from_string(const std::string& name) {
  if (name == "wall") return BackgroundKind::FrontoparallelWall;
  if (name == "flat") return BackgroundKind::FlatTextured;
  if (name == "corridor") return BackgroundKind::Corridor;
  throw DomainError("unknown background '" + name + "' (wall, flat, corridor)");
}

const char* background_name(BackgroundKind k) {
  switch (k) {
    case BackgroundKind::FrontoparallelWall: return "wall";
    case BackgroundKind::FlatTextured: return "flat";
    case BackgroundKind::Corridor: return "corridor";
  }
  return "?";
}

// ---- shared flag groups ---------------------------------------------------

struct RigFlags {
  StereoRig rig;
  double cx = -1.0;  // -1 = width/2
  double cy = -1.0;  // -1 = height/2

  void add(CLI::App* cmd) {
    cmd->add_option("--f", rig.focal_length_px, "focal length [px]")->capture_default_str();
    cmd->add_option("--b", rig.baseline_m, "stereo baseline [m]")->capture_default_str();
    cmd->add_option("--width", rig.image_width_px, "image width [px]")->capture_default_str();
    cmd->add_option("--height", rig.image_height_px, "image height [px]")->capture_default_str();
    cmd->add_option("--cx", cx, "principal point column [px]; -1 = width/2")->capture_default_str();
    cmd->add_option("--cy", cy, "principal point row [px]; -1 = height/2")->capture_default_str();
    cmd->add_option("--pitch", rig.pixel_pitch_m_per_px, "pixel pitch [m/px]")->capture_default_str();
  }

  StereoRig resolve() const {
    StereoRig r = rig;
    r.principal_x_px = cx < 0.0 ? r.image_width_px / 2.0 : cx;
    r.principal_y_px = cy < 0.0 ? r.image_height_px / 2.0 : cy;
    r.validate();
    return r;
  }
};

struct SceneFlags {
  std::string background = "wall";
  SceneSpec scene;

  void add(CLI::App* cmd, double default_wall_depth) {
    scene.wall_depth_m = default_wall_depth;
    cmd->add_option("--background", background, "background: wall | flat | corridor")
        ->capture_default_str();
    cmd->add_option("--wall-depth", scene.wall_depth_m, "wall distance [m]")->capture_default_str();
    cmd->add_option("--flat-depth", scene.flat_depth_m, "flat backdrop distance [m]")
        ->capture_default_str();
    cmd->add_option("--near", scene.near_m, "corridor depth at the bottom row [m]")
        ->capture_default_str();
    cmd->add_option("--far", scene.far_m, "corridor depth at the top row [m]")
        ->capture_default_str();
    cmd->add_option("--lux", scene.ambient_lux, "ambient light [lux], 0-4000")
        ->capture_default_str();
  }

  SceneSpec resolve(uint64_t seed) const {
    SceneSpec s = scene;
    s.background = background_from_string(background);
    s.texture_seed = seed;
    s.validate();
    return s;
  }
};

struct MatcherFlags {
  MatcherConfig cfg;
  std::string algorithm = "sgm";
  bool no_subpixel = false;

  void add(CLI::App* cmd, int default_max_disp, const std::string& default_algorithm = "sgm") {
    algorithm = default_algorithm;
    cfg.max_disparity = default_max_disp;
    cmd->add_option("--algorithm", algorithm, "matcher: sgm | block_sad")->capture_default_str();
    cmd->add_option("--block", cfg.block_size, "block_sad window size [px], odd")
        ->capture_default_str();
    cmd->add_option("--min-disp", cfg.min_disparity, "smallest disparity candidate [px]")
        ->capture_default_str();
    cmd->add_option("--max-disp", cfg.max_disparity,
                    default_max_disp == 0 ? "one past the largest disparity candidate [px]; 0 = auto"
                                          : "one past the largest disparity candidate [px]")
        ->capture_default_str();
    cmd->add_option("--p1", cfg.sgm_p1, "sgm penalty for +-1 disparity change")
        ->capture_default_str();
    cmd->add_option("--p2", cfg.sgm_p2, "sgm penalty for larger disparity changes")
        ->capture_default_str();
    cmd->add_option("--uniqueness", cfg.uniqueness_ratio,
                    "winner*ratio must beat the runner-up taken >= 2 px away")
        ->capture_default_str();
    cmd->add_option("--lr", cfg.lr_consistency_px,
                    "left-right consistency tolerance [px]; negative disables")
        ->capture_default_str();
    cmd->add_flag("--no-subpixel", no_subpixel, "disable parabolic sub-pixel refinement");
  }

  MatcherConfig resolve() const {
    MatcherConfig c = cfg;
    c.algorithm = match_algorithm_from_string(algorithm);
    c.subpixel = !no_subpixel;
    return c;
  }
};

struct DetectFlags {
  DetectConfig cfg;

  void add(CLI::App* cmd) {
    cmd->add_option("--deviation", cfg.deviation_frac,
                    "background deviation fraction that marks a blob pixel")
        ->capture_default_str();
    cmd->add_option("--min-area", cfg.min_blob_area_px, "smallest reportable blob [px]")
        ->capture_default_str();
    cmd->add_option("--oa-threshold", cfg.oa_threshold_m,
                    "obstacle-avoidance trigger depth [m] for the success flag")
        ->capture_default_str();
  }
};

std::optional<FakeDepthPrediction> pick_prediction(const std::vector<FakeDepthPrediction>& preds) {
  const FakeDepthPrediction* best = nullptr;
  for (const FakeDepthPrediction& p : preds) {
    if (p.exists && (best == nullptr || p.depth_m < best->depth_m)) best = &p;
  }
  if (best == nullptr && !preds.empty()) best = &preds.front();
  if (best == nullptr) return std::nullopt;
  return *best;
}

json rig_to_json(const StereoRig& r) {
  return json{{"focal_length_px", r.focal_length_px},
              {"baseline_m", r.baseline_m},
              {"width_px", r.image_width_px},
              {"height_px", r.image_height_px},
              {"principal_x_px", r.principal_x_px},
              {"principal_y_px", r.principal_y_px},
              {"pixel_pitch_m_per_px", r.pixel_pitch_m_per_px}};
}

json prediction_to_json(const FakeDepthPrediction& p, double step_m) {
  json j{{"source", to_string(p.source)},
         {"exists", p.exists},
         {"reason", to_string(p.reason)}};
  if (std::isnan(p.depth_m)) {
    j["depth_m"] = nullptr;
  } else {
    j["depth_m"] = p.depth_m;
  }
  if (p.exists) j["rounded_m"] = round_to_oa_step(p.depth_m, step_m);
  return j;
}

}  // namespace

// ---- predict ---------------------------------------------------------------

namespace {

struct PredictArgs {
  RigFlags rig;
  AttackGeometry geo;
  std::string mode = "beams";
  std::string pattern = "x";
  double step_m = 0.5;
  bool table = false;
  int z_max = 16;
};

int do_predict(const PredictArgs& args) {
  const StereoRig rig = args.rig.resolve();

  if (args.table) {
    if (args.z_max < 1) throw DomainError("--z-max must be >= 1");
    std::vector<double> distances;
    for (int z = 1; z <= args.z_max; ++z) distances.push_back(double(z));
    const auto rows = expected_table(rig, args.geo.separation_m, distances, args.step_m);
    std::cout << expected_table_to_csv(rows);
    return 0;
  }

  AttackGeometry geo = args.geo;
  geo.mode = attack_mode_from_string(args.mode);
  geo.pattern = attack_pattern_from_string(args.pattern);

  for (const FakeDepthPrediction& p : predict_fake_depth(rig, geo)) {
    std::cout << "source=" << to_string(p.source);
    std::cout << " raw_m=" << (std::isnan(p.depth_m) ? "n/a" : fmt("%.6f", p.depth_m));
    std::cout << " rounded_m="
              << (p.exists ? fmt("%.6f", round_to_oa_step(p.depth_m, args.step_m)) : "n/a");
    std::cout << " exists=" << (p.exists ? "true" : "false");
    std::cout << " reason=" << to_string(p.reason) << "\n";
  }
  return 0;
}

}  // namespace

// ---- render ----------------------------------------------------------------

namespace {

struct RenderArgs {
  RigFlags rig;
  SceneFlags scene;
  uint64_t seed = 0;
  std::string out_dir;
  std::string prefix = "scene";
};

int do_render(const RenderArgs& args) {
  const StereoRig rig = args.rig.resolve();
  const SceneSpec scene = args.scene.resolve(args.seed);
  const StereoFrame frame = render_scene(rig, scene);

  Plane<float> truth(rig.image_width_px, rig.image_height_px);
  for (int y = 0; y < truth.height; ++y) {
    const float depth = float(scene_row_depth_m(scene, y, truth.height));
    for (int x = 0; x < truth.width; ++x) truth.at(x, y) = depth;
  }

  const std::string dir = resolve_out_dir(args.out_dir);
  const std::string left = prepare_out_path(dir, args.prefix + "_left.ppm");
  const std::string right = prepare_out_path(dir, args.prefix + "_right.ppm");
  const std::string depth = prepare_out_path(dir, args.prefix + "_truth_depth.pfm");
  write_ppm(left, frame.left);
  write_ppm(right, frame.right);
  write_pfm(depth, truth);
  std::cout << "left=" << left << "\nright=" << right << "\ntruth_depth=" << depth << "\n";
  return 0;
}

}  // namespace

// ---- match -----------------------------------------------------------------

namespace {

struct MatchArgs {
  RigFlags rig;
  MatcherFlags matcher;
  std::string left_path;
  std::string right_path;
  std::string out_dir;
  std::string prefix = "match";
};

int do_match(const MatchArgs& args) {
  StereoRig rig = args.rig.resolve();
  const StereoFrame frame{read_ppm(args.left_path), read_ppm(args.right_path), 0.0};
  rig.image_width_px = frame.left.width;
  rig.image_height_px = frame.left.height;
  if (args.rig.cx < 0.0) rig.principal_x_px = rig.image_width_px / 2.0;
  if (args.rig.cy < 0.0) rig.principal_y_px = rig.image_height_px / 2.0;

  const MatcherConfig cfg = args.matcher.resolve();
  const DisparityMap disp = match(frame, cfg);
  const DepthMap depth = to_depth(disp, rig);

  const std::string dir = resolve_out_dir(args.out_dir);
  const std::string disp_path = prepare_out_path(dir, args.prefix + "_disparity.pfm");
  const std::string depth_path = prepare_out_path(dir, args.prefix + "_depth.pfm");
  write_pfm(disp_path, disparity_to_pfm(disp));
  write_pfm(depth_path, depth_to_pfm(depth));

  const size_t total = size_t(disp.width) * size_t(disp.height);
  std::cout << "valid_px=" << disp.valid_count() << "\n"
            << "coverage=" << fmt("%.4f", double(disp.valid_count()) / double(total)) << "\n"
            << "disparity=" << disp_path << "\n"
            << "depth=" << depth_path << "\n";
  return 0;
}

}  // namespace

// ---- analyze ---------------------------------------------------------------

namespace {

struct AnalyzeArgs {
  RigFlags rig;
  DetectFlags detect;
  std::string depth_path;
  std::string left_path;
  std::string right_path;
  double background_m = 0.0;
  double predicted_m = 0.0;
  bool have_predicted = false;
};

int do_analyze(const AnalyzeArgs& args) {
  const StereoRig base = args.rig.resolve();
  const Plane<float> img = read_pfm(args.depth_path);
  StereoRig rig = base;
  rig.image_width_px = img.width;
  rig.image_height_px = img.height;
  if (args.rig.cx < 0.0) rig.principal_x_px = img.width / 2.0;
  if (args.rig.cy < 0.0) rig.principal_y_px = img.height / 2.0;
  const DepthMap depth = pfm_to_depth(img, rig);

  std::optional<FakeDepthPrediction> predicted;
  if (args.have_predicted) {
    FakeDepthPrediction p;
    p.depth_m = args.predicted_m;
    if (args.predicted_m <= 0.0) {
      p.reason = Feasibility::BehindCamera;
    } else if (args.predicted_m <= rig.focal_length_m()) {
      p.reason = Feasibility::WithinFocalLength;
    } else {
      p.exists = true;
      p.reason = Feasibility::Feasible;
    }
    predicted = p;
  }

  const FakeDepthReport report =
      detect_fake_depth(depth, args.background_m, args.detect.cfg, predicted);
  std::cout << report_to_kv(report);

  if (!args.left_path.empty()) {
    const StereoFrame frame{read_ppm(args.left_path), read_ppm(args.right_path), 0.0};
    const SaturationReport sat = detect_saturation(frame);
    std::cout << "saturation_left_fraction=" << fmt("%.6f", sat.left_fraction) << "\n"
              << "saturation_right_fraction=" << fmt("%.6f", sat.right_fraction) << "\n"
              << "saturation_verdict=" << to_string(sat.verdict) << "\n";
  }
  return 0;
}

}  // namespace

// ---- attack ----------------------------------------------------------------

namespace {

struct AttackArgs {
  RigFlags rig;
  SceneFlags scene;
  MatcherFlags matcher;
  DetectFlags detect;
  AttackGeometry geo;
  std::string mode = "beams";
  std::string pattern = "x";
  bool clean = false;
  bool night = false;
  uint64_t seed = 0;
  double step_m = 0.5;
  std::string out_dir;
  std::string prefix = "attack";
};

int do_attack(const AttackArgs& args) {
  const StereoRig rig = args.rig.resolve();
  SceneSpec scene = args.scene.resolve(args.seed);
  if (args.night) scene.ambient_lux = 0.0;

  AttackGeometry geo = args.geo;
  geo.mode = attack_mode_from_string(args.mode);
  geo.pattern = attack_pattern_from_string(args.pattern);

  MatcherConfig mc = args.matcher.resolve();
  if (mc.max_disparity == 0) mc.max_disparity = suggested_max_disparity(rig, geo);

  std::optional<FakeDepthPrediction> predicted;
  AttackPlacement placement;
  if (!args.clean) {
    predicted = pick_prediction(predict_fake_depth(rig, geo));
    placement = place_attack(rig, geo, args.seed);
  }

  const StereoFrame frame = composite(render_scene(rig, scene), placement);
  const DisparityMap disp = match(frame, mc);
  const DepthMap depth = to_depth(disp, rig);
  const FakeDepthReport report =
      detect_fake_depth(depth, background_depth_m(scene), args.detect.cfg, predicted);
  const SaturationReport sat = detect_saturation(frame);

  const std::string dir = resolve_out_dir(args.out_dir);
  auto path = [&](const std::string& suffix) { return prepare_out_path(dir, args.prefix + suffix); };
  const std::string left_path = path("_left.ppm");
  const std::string right_path = path("_right.ppm");
  const std::string disp_path = path("_disparity.pfm");
  const std::string depth_path = path("_depth.pfm");
  const std::string cloud_path = path("_cloud.ply");
  const std::string report_txt_path = path("_report.txt");
  const std::string report_json_path = path("_report.json");

  write_ppm(left_path, frame.left);
  write_ppm(right_path, frame.right);
  write_pfm(disp_path, disparity_to_pfm(disp));
  write_pfm(depth_path, depth_to_pfm(depth));
  write_ply(cloud_path, to_point_cloud(depth, rig));

  const size_t total = size_t(disp.width) * size_t(disp.height);
  const double coverage = double(disp.valid_count()) / double(total);

  std::string kv = report_to_kv(report);
  kv += "saturation_left_fraction=" + fmt("%.6f", sat.left_fraction) + "\n";
  kv += "saturation_right_fraction=" + fmt("%.6f", sat.right_fraction) + "\n";
  kv += "saturation_verdict=" + std::string(to_string(sat.verdict)) + "\n";
  kv += "disparity_valid_px=" + std::to_string(disp.valid_count()) + "\n";
  kv += "disparity_coverage=" + fmt("%.4f", coverage) + "\n";

  json j;
  j["rig"] = rig_to_json(rig);
  j["scene"] = json{{"background", background_name(scene.background)},
                    {"background_depth_m", background_depth_m(scene)},
                    {"ambient_lux", scene.ambient_lux},
                    {"texture_seed", scene.texture_seed}};
  if (args.clean) {
    j["attack"] = nullptr;
    j["prediction"] = nullptr;
  } else {
    j["attack"] = json{{"separation_m", geo.separation_m},
                       {"distance_m", geo.distance_m},
                       {"lateral_offset_m", geo.lateral_offset_m},
                       {"mode", to_string(geo.mode)},
                       {"pattern", to_string(geo.pattern)},
                       {"jitter_seed", args.seed}};
    j["prediction"] = predicted ? prediction_to_json(*predicted, args.step_m) : json(nullptr);
  }
  j["matcher"] = json{{"algorithm", to_string(mc.algorithm)},
                      {"block_size", mc.block_size},
                      {"min_disparity", mc.min_disparity},
                      {"max_disparity", mc.max_disparity},
                      {"p1", mc.sgm_p1},
                      {"p2", mc.sgm_p2},
                      {"uniqueness_ratio", mc.uniqueness_ratio},
                      {"lr_consistency_px", mc.lr_consistency_px},
                      {"subpixel", mc.subpixel}};
  j["report"] = json{{"detected", report.detected},
                     {"success", report.success}};
  if (report.detected) {
    j["report"]["blob_center_u_px"] = report.blob_center.u;
    j["report"]["blob_center_v_px"] = report.blob_center.v;
    j["report"]["blob_area_px"] = report.blob_area_px;
    j["report"]["measured_depth_m"] = report.measured_depth_m;
    if (predicted) j["report"]["relative_error"] = report.relative_error;
  }
  j["saturation"] = json{{"left_fraction", sat.left_fraction},
                         {"right_fraction", sat.right_fraction},
                         {"verdict", to_string(sat.verdict)}};
  j["disparity"] = json{{"valid_px", disp.valid_count()}, {"coverage", coverage}};
  j["files"] = json{{"left", left_path},         {"right", right_path},
                    {"disparity", disp_path},    {"depth", depth_path},
                    {"cloud", cloud_path},       {"report_txt", report_txt_path},
                    {"report_json", report_json_path}};

  write_text(report_txt_path, kv);
  write_text(report_json_path, j.dump(2) + "\n");

  std::cout << kv;
  std::cout << "report_txt=" << report_txt_path << "\n"
            << "report_json=" << report_json_path << "\n";
  return 0;
}

}  // namespace

// ---- sim -------------------------------------------------------------------

namespace {

struct SimArgs {
  std::string scenario_path;
  std::string builtin;
  double period_s = 0.5;
  std::string out_dir;
  std::string prefix;
};

int do_sim(const SimArgs& args) {
  if (args.scenario_path.empty() == args.builtin.empty()) {
    throw DomainError("exactly one of --scenario or --builtin is required");
  }
  const Scenario scenario = args.scenario_path.empty()
                                ? builtin_scenario(args.builtin, args.period_s)
                                : load_scenario_file(args.scenario_path);
  const ScenarioResult result = run_scenario(scenario);
  const ScenarioSummary summary = summarize(result);

  const std::string dir = resolve_out_dir(args.out_dir);
  const std::string prefix = args.prefix.empty() ? result.scenario.name : args.prefix;
  const std::string log_path = prepare_out_path(dir, prefix + "_trajectory.csv");
  write_text(log_path, trajectory_to_csv(result));

  std::cout << "scenario=" << result.scenario.name << "\n"
            << "samples=" << result.samples.size() << "\n"
            << "min_forward_clearance_m="
            << (std::isinf(summary.min_forward_clearance_m)
                    ? "inf"
                    : fmt("%.6f", summary.min_forward_clearance_m))
            << "\n"
            << "forward_displacement_m=" << fmt("%.6f", summary.forward_displacement_m) << "\n"
            << "lateral_displacement_m=" << fmt("%.6f", summary.lateral_displacement_m) << "\n"
            << "forward_zero_crossings=" << summary.forward_zero_crossings << "\n"
            << "lateral_zero_crossings=" << summary.lateral_zero_crossings << "\n"
            << "oa_ever_engaged=" << (summary.oa_ever_engaged ? "true" : "false") << "\n"
            << "log=" << log_path << "\n";
  return 0;
}

}  // namespace

// ---- sweep -----------------------------------------------------------------

namespace {

struct SweepArgs {
  RigFlags rig;
  SceneFlags scene;
  MatcherFlags matcher;
  DetectFlags detect;
  std::vector<double> d_list;
  std::vector<double> z_list;
  std::vector<std::string> modes{"beams", "orbs"};
  std::vector<std::string> patterns{"x", "trapezoid"};
  std::vector<std::string> algorithms{"block_sad"};
  uint64_t seed = 0;
  std::string csv_path;
};

int do_sweep(const SweepArgs& args) {
  const StereoRig rig = args.rig.resolve();

  auto sorted_unique_values = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  auto sorted_unique_names = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  const std::vector<double> ds = sorted_unique_values(args.d_list);
  const std::vector<double> zs = sorted_unique_values(args.z_list);
  const std::vector<std::string> modes = sorted_unique_names(args.modes);
  const std::vector<std::string> patterns = sorted_unique_names(args.patterns);
  const std::vector<std::string> algorithms = sorted_unique_names(args.algorithms);
  if (ds.empty() || zs.empty()) throw DomainError("--d-list and --z-list must be non-empty");

  std::string csv =
      "separation_m,distance_m,mode,pattern,algorithm,predicted_depth_m,reason,"
      "detected,measured_depth_m,relative_error,success\n";

  for (const double d : ds) {
    for (const double z : zs) {
      for (const std::string& mode : modes) {
        for (const std::string& pattern : patterns) {
          for (const std::string& algorithm : algorithms) {
            AttackGeometry geo;
            geo.separation_m = d;
            geo.distance_m = z;
            geo.mode = attack_mode_from_string(mode);
            geo.pattern = attack_pattern_from_string(pattern);

            SceneSpec scene = args.scene.resolve(args.seed);
            MatcherConfig mc = args.matcher.resolve();
            mc.algorithm = match_algorithm_from_string(algorithm);
            if (mc.max_disparity == 0) mc.max_disparity = suggested_max_disparity(rig, geo);

            const std::optional<FakeDepthPrediction> predicted =
                pick_prediction(predict_fake_depth(rig, geo));
            const StereoFrame frame =
                composite(render_scene(rig, scene), place_attack(rig, geo, args.seed));
            const DepthMap depth = to_depth(match(frame, mc), rig);
            const FakeDepthReport report =
                detect_fake_depth(depth, background_depth_m(scene), args.detect.cfg, predicted);

            csv += fmt("%g", d) + "," + fmt("%g", z) + "," + mode + "," + pattern + "," +
                   algorithm + ",";
            if (predicted && !std::isnan(predicted->depth_m)) {
              csv += fmt("%.6f", predicted->depth_m);
            } else {
              csv += "n/a";
            }
            csv += ",";
            csv += predicted ? to_string(predicted->reason) : "n/a";
            csv += ",";
            csv += report.detected ? "true" : "false";
            csv += ",";
            csv += report.detected ? fmt("%.6f", report.measured_depth_m) : "n/a";
            csv += ",";
            csv += (report.detected && predicted && predicted->exists)
                       ? fmt("%.4f", report.relative_error)
                       : "n/a";
            csv += ",";
            csv += report.success ? "true" : "false";
            csv += "\n";
          }
        }
      }
    }
  }

  std::cout << csv;
  if (!args.csv_path.empty()) write_text(args.csv_path, csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stereo-vision spoofing laboratory: fake-depth prediction, synthetic stereo "
               "rendering with glare/orb injection, block and semi-global matching, fake-obstacle "
               "analysis, and a drone obstacle-avoidance simulator."};
  app.require_subcommand(1);
  app.set_version_flag("--version", "1.0.0");

  PredictArgs predict_args;
  CLI::App* predict_cmd =
      app.add_subcommand("predict", "Closed-form fake-depth prediction for an attack geometry");
  predict_args.rig.add(predict_cmd);
  predict_cmd->add_option("--d", predict_args.geo.separation_m, "light-source separation [m]")
      ->capture_default_str();
  predict_cmd->add_option("--z", predict_args.geo.distance_m, "source distance to the rig [m]")
      ->capture_default_str();
  predict_cmd
      ->add_option("--offset", predict_args.geo.lateral_offset_m, "pair midpoint lateral offset [m]")
      ->capture_default_str();
  predict_cmd->add_option("--mode", predict_args.mode, "attack mode: beams | orbs | combined")
      ->capture_default_str();
  predict_cmd->add_option("--pattern", predict_args.pattern, "pattern: x | trapezoid | triangle")
      ->capture_default_str();
  predict_cmd->add_option("--step", predict_args.step_m, "display rounding step [m]")
      ->capture_default_str();
  predict_cmd->add_flag("--table", predict_args.table,
                        "emit the expected-depth CSV table for z = 1..z-max instead");
  predict_cmd->add_option("--z-max", predict_args.z_max, "largest distance in the table [m]")
      ->capture_default_str();

  RenderArgs render_args;
  CLI::App* render_cmd =
      app.add_subcommand("render", "Render a clean synthetic stereo pair plus true depth");
  render_args.rig.add(render_cmd);
  render_args.scene.add(render_cmd, 4.0);
  render_cmd->add_option("--seed", render_args.seed, "texture seed")->capture_default_str();
  render_cmd->add_option("--out", render_args.out_dir, "output directory (or $STEREOSPOOF_OUT)");
  render_cmd->add_option("--prefix", render_args.prefix, "output filename prefix")
      ->capture_default_str();

  MatchArgs match_args;
  CLI::App* match_cmd = app.add_subcommand("match", "Stereo-match a PPM pair into disparity/depth");
  match_args.rig.add(match_cmd);
  match_args.matcher.add(match_cmd, 64);
  match_cmd->add_option("--left", match_args.left_path, "left image [PPM]")
      ->required()
      ->check(CLI::ExistingFile);
  match_cmd->add_option("--right", match_args.right_path, "right image [PPM]")
      ->required()
      ->check(CLI::ExistingFile);
  match_cmd->add_option("--out", match_args.out_dir, "output directory (or $STEREOSPOOF_OUT)");
  match_cmd->add_option("--prefix", match_args.prefix, "output filename prefix")
      ->capture_default_str();

  AnalyzeArgs analyze_args;
  CLI::App* analyze_cmd =
      app.add_subcommand("analyze", "Blob-analyze a depth PFM for fake obstacles");
  analyze_args.rig.add(analyze_cmd);
  analyze_args.detect.add(analyze_cmd);
  analyze_cmd->add_option("--depth", analyze_args.depth_path, "depth map [PFM]")
      ->required()
      ->check(CLI::ExistingFile);
  analyze_cmd
      ->add_option("--background", analyze_args.background_m, "scene background depth [m]")
      ->required();
  CLI::Option* left_opt = analyze_cmd
                              ->add_option("--left", analyze_args.left_path,
                                           "left image [PPM] for the saturation screen")
                              ->check(CLI::ExistingFile);
  analyze_cmd
      ->add_option("--right", analyze_args.right_path, "right image [PPM] for the saturation screen")
      ->check(CLI::ExistingFile)
      ->needs(left_opt);
  CLI::Option* predicted_opt = analyze_cmd->add_option(
      "--predicted", analyze_args.predicted_m, "predicted fake depth [m] for the error column");
  analyze_cmd->parse_complete_callback(
      [&analyze_args, predicted_opt] { analyze_args.have_predicted = predicted_opt->count() > 0; });

  AttackArgs attack_args;
  CLI::App* attack_cmd = app.add_subcommand(
      "attack", "Full pipeline: render + inject + match + analyze, writing all artifacts");
  attack_args.rig.add(attack_cmd);
  attack_args.scene.add(attack_cmd, 12.0);
  attack_args.matcher.add(attack_cmd, 0, "block_sad");
  attack_args.detect.add(attack_cmd);
  attack_cmd->add_option("--d", attack_args.geo.separation_m, "light-source separation [m]")
      ->capture_default_str();
  attack_cmd->add_option("--z", attack_args.geo.distance_m, "source distance to the rig [m]")
      ->capture_default_str();
  attack_cmd
      ->add_option("--offset", attack_args.geo.lateral_offset_m, "pair midpoint lateral offset [m]")
      ->capture_default_str();
  attack_cmd->add_option("--mode", attack_args.mode, "attack mode: beams | orbs | combined")
      ->capture_default_str();
  attack_cmd->add_option("--pattern", attack_args.pattern, "pattern: x | trapezoid | triangle")
      ->capture_default_str();
  attack_cmd->add_flag("--clean", attack_args.clean, "no injection (baseline scene)");
  attack_cmd->add_flag("--night", attack_args.night, "force ambient light to 0 lux");
  attack_cmd->add_option("--seed", attack_args.seed, "texture and jitter seed")
      ->capture_default_str();
  attack_cmd->add_option("--step", attack_args.step_m, "display rounding step [m]")
      ->capture_default_str();
  attack_cmd->add_option("--out", attack_args.out_dir, "output directory (or $STEREOSPOOF_OUT)");
  attack_cmd->add_option("--prefix", attack_args.prefix, "output filename prefix")
      ->capture_default_str();

  SimArgs sim_args;
  CLI::App* sim_cmd =
      app.add_subcommand("sim", "Run a flight scenario and write the trajectory log");
  sim_cmd->add_option("--scenario", sim_args.scenario_path, "scenario file path")
      ->check(CLI::ExistingFile);
  sim_cmd
      ->add_option("--builtin", sim_args.builtin,
                   "built-in scenario: sudden_stop | drift_away | shake_fb | shake_lr")
      ->check(CLI::IsMember(builtin_scenario_names()));
  sim_cmd->add_option("--period", sim_args.period_s, "shake injection period [s] (builtins only)")
      ->capture_default_str();
  sim_cmd->add_option("--out", sim_args.out_dir, "output directory (or $STEREOSPOOF_OUT)");
  sim_cmd->add_option("--prefix", sim_args.prefix, "log filename prefix (default: scenario name)");

  SweepArgs sweep_args;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "Attack-fidelity grid over separations x distances x modes x patterns x algorithms");
  sweep_args.rig.add(sweep_cmd);
  sweep_args.scene.add(sweep_cmd, 12.0);
  sweep_args.matcher.add(sweep_cmd, 0, "block_sad");
  sweep_args.detect.add(sweep_cmd);
  sweep_cmd->add_option("--d-list", sweep_args.d_list, "separations [m], comma-separated")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--z-list", sweep_args.z_list, "distances [m], comma-separated")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--modes", sweep_args.modes, "attack modes, comma-separated")
      ->delimiter(',')
      ->capture_default_str();
  sweep_cmd->add_option("--patterns", sweep_args.patterns, "patterns, comma-separated")
      ->delimiter(',')
      ->capture_default_str();
  sweep_cmd->add_option("--algorithms", sweep_args.algorithms, "matchers, comma-separated")
      ->delimiter(',')
      ->capture_default_str();
  sweep_cmd->add_option("--seed", sweep_args.seed, "texture and jitter seed")
      ->capture_default_str();
  sweep_cmd->add_option("--csv", sweep_args.csv_path, "also write the CSV to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*predict_cmd) return run_guarded([&] { return do_predict(predict_args); });
  if (*render_cmd) return run_guarded([&] { return do_render(render_args); });
  if (*match_cmd) return run_guarded([&] { return do_match(match_args); });
  if (*analyze_cmd) return run_guarded([&] { return do_analyze(analyze_args); });
  if (*attack_cmd) return run_guarded([&] { return do_attack(attack_args); });
  if (*sim_cmd) return run_guarded([&] { return do_sim(sim_args); });
  if (*sweep_cmd) return run_guarded([&] { return do_sweep(sweep_args); });
  return 2;
}
