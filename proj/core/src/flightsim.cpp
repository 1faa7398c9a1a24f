#include "stereospoof/flightsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "stereospoof/analysis.hpp"
#include "stereospoof/depthmap.hpp"
#include "stereospoof/render.hpp"

namespace stereospoof {

const char* to_string(FlightMode m) {
  return m == FlightMode::Positioning ? "positioning" : "active_track";
}

const char* to_string(Sector s) {
  switch (s) {
    case Sector::Forward: return "forward";
    case Sector::Backward: return "backward";
    case Sector::Left: return "left";
    case Sector::Right: return "right";
  }
  return "?";
}

const char* to_string(ObservationSource s) {
  return s == ObservationSource::TrueScene ? "true_scene" : "manipulated";
}

FlightMode flight_mode_from_string(const std::string& name) {
  if (name == "positioning") return FlightMode::Positioning;
  if (name == "active_track" || name == "activetrack") return FlightMode::ActiveTrack;
  throw DomainError("unknown flight mode '" + name + "' (positioning, active_track)");
}

Sector sector_from_string(const std::string& name) {
  if (name == "forward") return Sector::Forward;
  if (name == "backward") return Sector::Backward;
  if (name == "left") return Sector::Left;
  if (name == "right") return Sector::Right;
  throw DomainError("unknown sector '" + name + "' (forward, backward, left, right)");
}

double DepthObservation::sector(Sector s) const {
  switch (s) {
    case Sector::Forward: return forward_m;
    case Sector::Backward: return backward_m;
    case Sector::Left: return left_m;
    case Sector::Right: return right_m;
  }
  return forward_m;
}

double& DepthObservation::sector(Sector s) {
  switch (s) {
    case Sector::Forward: return forward_m;
    case Sector::Backward: return backward_m;
    case Sector::Left: return left_m;
    case Sector::Right: return right_m;
  }
  return forward_m;
}

void SimConfig::validate() const {
  if (!(dt_s > 0.0) || !(dt_s <= 0.1)) throw ConfigError("dt_s must be in (0, 0.1]");
  if (!std::isfinite(tau_s) || !(tau_s > 0.0)) throw ConfigError("tau_s must be > 0");
  if (!std::isfinite(max_speed_mps) || !(max_speed_mps > 0.0)) {
    throw ConfigError("max_speed_mps must be > 0");
  }
  if (!std::isfinite(oa_threshold_m) || !(oa_threshold_m > 0.0)) {
    throw ConfigError("oa_threshold_m must be > 0");
  }
  if (!std::isfinite(v_avoid_mps) || v_avoid_mps < 0.0) {
    throw ConfigError("v_avoid_mps must be >= 0");
  }
}

DroneState step(const DroneState& state, const Vec3& pilot_cmd_mps, const DepthObservation& obs,
                double dt_s, const SimConfig& cfg) {
  if (!(dt_s > 0.0) || !(dt_s <= 0.1)) throw DomainError("dt_s must be in (0, 0.1]");

  const bool blocked_fwd = obs.forward_m < cfg.oa_threshold_m;
  const bool blocked_back = obs.backward_m < cfg.oa_threshold_m;
  const bool blocked_left = obs.left_m < cfg.oa_threshold_m;
  const bool blocked_right = obs.right_m < cfg.oa_threshold_m;

  // Body axes in the world: right = (cos h, sin h), forward = (-sin h, cos h).
  const double ch = std::cos(state.heading_rad);
  const double sh = std::sin(state.heading_rad);
  Vec3 v{state.velocity_mps.x * ch + state.velocity_mps.y * sh,
         -state.velocity_mps.x * sh + state.velocity_mps.y * ch, state.velocity_mps.z};

  Vec3 target = pilot_cmd_mps;
  if (state.mode == FlightMode::ActiveTrack) {
    // A blocked sector overrides the pilot on its axis: retreat away from it
    // at v_avoid; both sides blocked cancel to a hover on that axis.
    if (blocked_left || blocked_right) {
      target.x = cfg.v_avoid_mps * ((blocked_left ? 1.0 : 0.0) - (blocked_right ? 1.0 : 0.0));
    }
    if (blocked_fwd || blocked_back) {
      target.y = cfg.v_avoid_mps * ((blocked_back ? 1.0 : 0.0) - (blocked_fwd ? 1.0 : 0.0));
    }
  }

  const double a = dt_s / cfg.tau_s;
  v.x += a * (target.x - v.x);
  v.y += a * (target.y - v.y);
  v.z += a * (target.z - v.z);

  // Brake-and-hover: never keep moving toward a blocked sector the pilot is
  // still pushing into (retreating motion is left alone).
  if (blocked_fwd && pilot_cmd_mps.y > 0.0 && v.y > 0.0) v.y = 0.0;
  if (blocked_back && pilot_cmd_mps.y < 0.0 && v.y < 0.0) v.y = 0.0;
  if (blocked_right && pilot_cmd_mps.x > 0.0 && v.x > 0.0) v.x = 0.0;
  if (blocked_left && pilot_cmd_mps.x < 0.0 && v.x < 0.0) v.x = 0.0;

  DroneState next = state;
  next.velocity_mps = Vec3{v.x * ch - v.y * sh, v.x * sh + v.y * ch, v.z};

  const Vec3& w = next.velocity_mps;
  const double speed = std::sqrt(w.x * w.x + w.y * w.y + w.z * w.z);
  if (speed > cfg.max_speed_mps) {
    const double scale = cfg.max_speed_mps / speed;
    next.velocity_mps = Vec3{w.x * scale, w.y * scale, w.z * scale};
  }

  next.position_m.x += next.velocity_mps.x * dt_s;
  next.position_m.y += next.velocity_mps.y * dt_s;
  next.position_m.z += next.velocity_mps.z * dt_s;
  if (next.position_m.z < 0.0) {
    next.position_m.z = 0.0;
    if (next.velocity_mps.z < 0.0) next.velocity_mps.z = 0.0;
  }
  next.oa_engaged = blocked_fwd || blocked_back || blocked_left || blocked_right;
  return next;
}

void InjectionSchedule::validate() const {
  if (!(repeat_period_s >= 0.0) || !std::isfinite(repeat_period_s)) {
    throw ScheduleError("repeat_period_s must be >= 0");
  }
  for (const InjectionEvent& e : events) {
    if (!std::isfinite(e.t_start_s) || e.t_start_s < 0.0) {
      throw ScheduleError("event start must be >= 0");
    }
    if (!std::isfinite(e.t_end_s) || !(e.t_end_s > e.t_start_s)) {
      throw ScheduleError("event window must be non-empty");
    }
    // NaN marks a not-yet-resolved "auto" depth and is allowed here.
    if (!std::isnan(e.fake_depth_m) && !(std::isfinite(e.fake_depth_m) && e.fake_depth_m > 0.0)) {
      throw ScheduleError("fake depth must be > 0");
    }
    if (repeat_period_s > 0.0 && e.t_end_s > repeat_period_s) {
      throw ScheduleError("events must fit inside the repeat period");
    }
  }
  for (int s = 0; s < 4; ++s) {
    std::vector<const InjectionEvent*> per;
    for (const InjectionEvent& e : events) {
      if (e.sector == Sector(s)) per.push_back(&e);
    }
    std::sort(per.begin(), per.end(),
              [](const InjectionEvent* a, const InjectionEvent* b) { return a->t_start_s < b->t_start_s; });
    for (size_t i = 1; i < per.size(); ++i) {
      if (per[i]->t_start_s < per[i - 1]->t_end_s) {
        throw ScheduleError(std::string("overlapping events in sector ") + to_string(Sector(s)));
      }
    }
  }
}

DepthObservation manipulate(const DepthObservation& obs_true, const InjectionSchedule& sched,
                            double t_s) {
  DepthObservation out = obs_true;
  const double t = sched.repeat_period_s > 0.0 ? std::fmod(t_s, sched.repeat_period_s) : t_s;
  bool any_active = false;
  for (const InjectionEvent& e : sched.events) {
    if (t < e.t_start_s || t >= e.t_end_s) continue;
    double& depth = out.sector(e.sector);
    depth = e.mask_truth ? e.fake_depth_m : std::min(depth, e.fake_depth_m);
    any_active = true;
  }
  if (any_active) out.source = ObservationSource::Manipulated;
  return out;
}

void Scenario::validate() const {
  if (name.empty()) throw ConfigError("scenario name must be non-empty");
  config.validate();
  if (!std::isfinite(duration_s) || !(duration_s > 0.0)) {
    throw ConfigError("duration_s must be > 0");
  }
  const long long steps = std::llround(duration_s / config.dt_s);
  if (steps < 1 || steps > 5'000'000) throw ConfigError("duration_s/dt_s out of range");
  if (!std::isfinite(start_position_m.x) || !std::isfinite(start_position_m.y) ||
      !std::isfinite(start_position_m.z) || start_position_m.z < 0.0) {
    throw ConfigError("start position must be finite with z >= 0");
  }
  double prev_t = -1.0;
  for (const PilotSegment& p : pilot) {
    if (!std::isfinite(p.t_s) || p.t_s < 0.0 || p.t_s < prev_t) {
      throw ConfigError("pilot segment times must be non-decreasing and >= 0");
    }
    prev_t = p.t_s;
    const double mag =
        std::sqrt(p.cmd_mps.x * p.cmd_mps.x + p.cmd_mps.y * p.cmd_mps.y + p.cmd_mps.z * p.cmd_mps.z);
    if (!std::isfinite(mag) || mag > config.max_speed_mps) {
      throw ConfigError("pilot commands must not exceed max_speed_mps");
    }
  }
  for (int s = 0; s < 4; ++s) {
    if (!(true_sectors.sector(Sector(s)) > 0.0)) {
      throw ConfigError("sector depths must be > 0 (or inf)");
    }
  }
  schedule.validate();
  if (rendered.enabled) {
    if (!std::isfinite(rendered.separation_m) || !(rendered.separation_m > 0.0) ||
        !std::isfinite(rendered.distance_m) || !(rendered.distance_m > 0.0)) {
      throw ConfigError("render_attack separation and distance must be > 0");
    }
  }
}

namespace {

std::string fmt_value(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_fixed(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string scenario_to_text(const Scenario& sc) {
  std::string out;
  auto kv = [&out](const std::string& key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  kv("name", sc.name);
  kv("mode", to_string(sc.mode));
  kv("duration_s", fmt_value(sc.duration_s));
  kv("dt_s", fmt_value(sc.config.dt_s));
  kv("tau_s", fmt_value(sc.config.tau_s));
  kv("max_speed_mps", fmt_value(sc.config.max_speed_mps));
  kv("oa_threshold_m", fmt_value(sc.config.oa_threshold_m));
  kv("v_avoid_mps", fmt_value(sc.config.v_avoid_mps));
  kv("seed", std::to_string(sc.seed));
  kv("start", fmt_value(sc.start_position_m.x) + " " + fmt_value(sc.start_position_m.y) + " " +
                  fmt_value(sc.start_position_m.z));
  for (const PilotSegment& p : sc.pilot) {
    kv("pilot", fmt_value(p.t_s) + " " + fmt_value(p.cmd_mps.x) + " " + fmt_value(p.cmd_mps.y) +
                    " " + fmt_value(p.cmd_mps.z));
  }
  for (int s = 0; s < 4; ++s) {
    kv("sector", std::string(to_string(Sector(s))) + " " + fmt_value(sc.true_sectors.sector(Sector(s))));
  }
  if (sc.schedule.repeat_period_s > 0.0) {
    kv("repeat_period_s", fmt_value(sc.schedule.repeat_period_s));
  }
  for (const InjectionEvent& e : sc.schedule.events) {
    kv("inject", fmt_value(e.t_start_s) + " " + fmt_value(e.t_end_s) + " " + to_string(e.sector) +
                     " " + (std::isnan(e.fake_depth_m) ? "auto" : fmt_value(e.fake_depth_m)) +
                     " " + (e.mask_truth ? "mask" : "min"));
  }
  if (sc.rendered.enabled) {
    kv("render_attack", fmt_value(sc.rendered.separation_m) + " " + fmt_value(sc.rendered.distance_m) +
                            " " + to_string(sc.rendered.mode) + " " + to_string(sc.rendered.pattern) +
                            " " + to_string(sc.rendered.algorithm));
  }
  return out;
}

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& token, int line, const char* what) {
  try {
    size_t pos = 0;
    const double v = std::stod(token, &pos);
    if (pos != token.size() || std::isnan(v)) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, std::string(what) + ": bad number '" + token + "'");
  }
}

std::vector<std::string> split_tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& default_name) {
  Scenario sc;
  sc.name = default_name;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    const size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "empty key");
    if (value.empty()) throw ParseError(line_no, "empty value for '" + key + "'");
    const std::vector<std::string> tokens = split_tokens(value);

    try {
      if (key == "name") {
        sc.name = value;
      } else if (key == "mode") {
        sc.mode = flight_mode_from_string(value);
      } else if (key == "duration_s") {
        sc.duration_s = parse_number(value, line_no, "duration_s");
      } else if (key == "dt_s") {
        sc.config.dt_s = parse_number(value, line_no, "dt_s");
      } else if (key == "tau_s") {
        sc.config.tau_s = parse_number(value, line_no, "tau_s");
      } else if (key == "max_speed_mps") {
        sc.config.max_speed_mps = parse_number(value, line_no, "max_speed_mps");
      } else if (key == "oa_threshold_m") {
        sc.config.oa_threshold_m = parse_number(value, line_no, "oa_threshold_m");
      } else if (key == "v_avoid_mps") {
        sc.config.v_avoid_mps = parse_number(value, line_no, "v_avoid_mps");
      } else if (key == "seed") {
        if (value.empty() || value[0] == '-') throw ParseError(line_no, "seed must be >= 0");
        std::istringstream sin(value);
        unsigned long long seed = 0;
        if (!(sin >> seed) || !(sin >> std::ws).eof()) {
          throw ParseError(line_no, "seed: bad integer '" + value + "'");
        }
        sc.seed = seed;
      } else if (key == "start") {
        if (tokens.size() != 3) throw ParseError(line_no, "start needs: x y z");
        sc.start_position_m = Vec3{parse_number(tokens[0], line_no, "start"),
                                   parse_number(tokens[1], line_no, "start"),
                                   parse_number(tokens[2], line_no, "start")};
      } else if (key == "pilot") {
        if (tokens.size() != 4) throw ParseError(line_no, "pilot needs: t x y z");
        PilotSegment seg;
        seg.t_s = parse_number(tokens[0], line_no, "pilot");
        seg.cmd_mps = Vec3{parse_number(tokens[1], line_no, "pilot"),
                           parse_number(tokens[2], line_no, "pilot"),
                           parse_number(tokens[3], line_no, "pilot")};
        sc.pilot.push_back(seg);
      } else if (key == "sector") {
        if (tokens.size() != 2) throw ParseError(line_no, "sector needs: <name> <depth|inf>");
        const Sector s = sector_from_string(tokens[0]);
        sc.true_sectors.sector(s) = parse_number(tokens[1], line_no, "sector");
      } else if (key == "inject") {
        if (tokens.size() != 4 && tokens.size() != 5) {
          throw ParseError(line_no, "inject needs: t0 t1 <sector> <depth|auto> [min|mask]");
        }
        InjectionEvent e;
        e.t_start_s = parse_number(tokens[0], line_no, "inject");
        e.t_end_s = parse_number(tokens[1], line_no, "inject");
        e.sector = sector_from_string(tokens[2]);
        e.fake_depth_m = tokens[3] == "auto" ? std::numeric_limits<double>::quiet_NaN()
                                             : parse_number(tokens[3], line_no, "inject");
        if (tokens.size() == 5) {
          if (tokens[4] == "mask") {
            e.mask_truth = true;
          } else if (tokens[4] != "min") {
            throw ParseError(line_no, "inject combine flag must be 'min' or 'mask'");
          }
        }
        sc.schedule.events.push_back(e);
      } else if (key == "repeat_period_s") {
        sc.schedule.repeat_period_s = parse_number(value, line_no, "repeat_period_s");
      } else if (key == "render_attack") {
        if (tokens.size() != 5) {
          throw ParseError(line_no,
                           "render_attack needs: <separation> <distance> <mode> <pattern> <algorithm>");
        }
        sc.rendered.enabled = true;
        sc.rendered.separation_m = parse_number(tokens[0], line_no, "render_attack");
        sc.rendered.distance_m = parse_number(tokens[1], line_no, "render_attack");
        sc.rendered.mode = attack_mode_from_string(tokens[2]);
        sc.rendered.pattern = attack_pattern_from_string(tokens[3]);
        sc.rendered.algorithm = match_algorithm_from_string(tokens[4]);
      } else {
        throw ParseError(line_no, "unknown key '" + key + "'");
      }
    } catch (const DomainError& e) {
      throw ParseError(line_no, e.what());
    }
  }

  sc.validate();
  const bool has_auto = std::any_of(sc.schedule.events.begin(), sc.schedule.events.end(),
                                    [](const InjectionEvent& e) { return std::isnan(e.fake_depth_m); });
  if (has_auto && !sc.rendered.enabled) {
    throw ParseError(line_no, "an 'auto' fake depth requires a render_attack line");
  }
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path);

  std::string stem = path;
  const size_t slash = stem.find_last_of("/\\");
  if (slash != std::string::npos) stem.erase(0, slash + 1);
  const size_t dot = stem.find_last_of('.');
  if (dot != std::string::npos && dot > 0) stem.erase(dot);
  return parse_scenario(buf.str(), stem.empty() ? "scenario" : stem);
}

std::vector<std::string> builtin_scenario_names() {
  return {"sudden_stop", "drift_away", "shake_fb", "shake_lr"};
}

Scenario builtin_scenario(const std::string& name, double period_s) {
  if (!std::isfinite(period_s) || !(period_s > 0.0)) {
    throw DomainError("period_s must be > 0");
  }
  Scenario sc;
  sc.name = name;
  sc.duration_s = 10.0;
  if (name == "sudden_stop") {
    sc.mode = FlightMode::Positioning;
    sc.pilot.push_back(PilotSegment{0.0, Vec3{0.0, 2.0, 0.0}});
    sc.schedule.events.push_back(InjectionEvent{5.0, 10.0, Sector::Forward, 0.5, false});
  } else if (name == "drift_away") {
    sc.mode = FlightMode::ActiveTrack;
    sc.pilot.push_back(PilotSegment{0.0, Vec3{0.0, 2.0, 0.0}});
    sc.schedule.events.push_back(InjectionEvent{0.0, 10.0, Sector::Right, 4.0, false});
  } else if (name == "shake_fb") {
    sc.mode = FlightMode::ActiveTrack;
    sc.pilot.push_back(PilotSegment{0.0, Vec3{0.0, 2.0, 0.0}});
    sc.schedule.events.push_back(InjectionEvent{0.0, period_s / 2.0, Sector::Forward, 0.5, false});
    sc.schedule.repeat_period_s = period_s;
  } else if (name == "shake_lr") {
    sc.mode = FlightMode::ActiveTrack;
    sc.pilot.push_back(PilotSegment{0.0, Vec3{2.0, 0.0, 0.0}});
    sc.schedule.events.push_back(InjectionEvent{0.0, period_s / 2.0, Sector::Right, 0.5, false});
    sc.schedule.repeat_period_s = period_s;
  } else {
    throw DomainError("unknown builtin scenario '" + name +
                      "' (sudden_stop, drift_away, shake_fb, shake_lr)");
  }
  return sc;
}

namespace {

// Measures the fake-obstacle depth the image pipeline reports for the
// scenario's rendered attack (night wall backdrop, default rig).
double rendered_fake_depth(const Scenario& sc) {
  StereoRig rig;
  SceneSpec scene;
  scene.background = BackgroundKind::FrontoparallelWall;
  scene.wall_depth_m = 12.0;
  scene.ambient_lux = 0.0;
  scene.texture_seed = sc.seed;

  AttackGeometry geo;
  geo.separation_m = sc.rendered.separation_m;
  geo.distance_m = sc.rendered.distance_m;
  geo.mode = sc.rendered.mode;
  geo.pattern = sc.rendered.pattern;

  MatcherConfig mc;
  mc.algorithm = sc.rendered.algorithm;
  mc.max_disparity = suggested_max_disparity(rig, geo);

  const StereoFrame frame = composite(render_scene(rig, scene), place_attack(rig, geo, sc.seed));
  const DepthMap depth = to_depth(match(frame, mc), rig);
  const FakeDepthReport report = detect_fake_depth(depth, background_depth_m(scene));
  if (!report.detected) {
    throw ScheduleError("rendered attack produced no detectable obstacle");
  }
  return report.measured_depth_m;
}

}  // namespace

ScenarioResult run_scenario(const Scenario& scenario) {
  ScenarioResult result;
  result.scenario = scenario;
  Scenario& sc = result.scenario;
  sc.validate();

  const bool has_auto = std::any_of(sc.schedule.events.begin(), sc.schedule.events.end(),
                                    [](const InjectionEvent& e) { return std::isnan(e.fake_depth_m); });
  if (has_auto) {
    if (!sc.rendered.enabled) throw ScheduleError("an 'auto' fake depth requires render_attack");
    const double measured = rendered_fake_depth(sc);
    for (InjectionEvent& e : sc.schedule.events) {
      if (std::isnan(e.fake_depth_m)) e.fake_depth_m = measured;
    }
    sc.schedule.validate();
  }

  const SimConfig& cfg = sc.config;
  const long long n_steps = std::llround(sc.duration_s / cfg.dt_s);
  DroneState state;
  state.mode = sc.mode;
  state.position_m = sc.start_position_m;

  result.samples.reserve(size_t(n_steps) + 1);
  size_t pilot_idx = 0;
  for (long long i = 0; i <= n_steps; ++i) {
    const double t = double(i) * cfg.dt_s;
    const DepthObservation obs = manipulate(sc.true_sectors, sc.schedule, t);
    result.samples.push_back(TrajectorySample{t, state, obs});
    if (i == n_steps) break;
    while (pilot_idx + 1 < sc.pilot.size() && sc.pilot[pilot_idx + 1].t_s <= t) ++pilot_idx;
    Vec3 cmd;
    if (!sc.pilot.empty() && sc.pilot[pilot_idx].t_s <= t) cmd = sc.pilot[pilot_idx].cmd_mps;
    state = step(state, cmd, obs, cfg.dt_s, cfg);
  }
  return result;
}

std::string trajectory_to_csv(const ScenarioResult& result) {
  std::string out;
  {
    const std::string header = scenario_to_text(result.scenario);
    size_t begin = 0;
    while (begin < header.size()) {
      size_t end = header.find('\n', begin);
      if (end == std::string::npos) end = header.size();
      out += "# ";
      out.append(header, begin, end - begin);
      out += '\n';
      begin = end + 1;
    }
  }
  out += "t_s,px_m,py_m,pz_m,vx_mps,vy_mps,vz_mps,heading_rad,mode,oa_engaged,"
         "forward_m,backward_m,left_m,right_m,source\n";

  char buf[320];
  for (const TrajectorySample& s : result.samples) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%s,%d,", s.t_s,
                  s.state.position_m.x, s.state.position_m.y, s.state.position_m.z,
                  s.state.velocity_mps.x, s.state.velocity_mps.y, s.state.velocity_mps.z,
                  s.state.heading_rad, to_string(s.state.mode), s.state.oa_engaged ? 1 : 0);
    out += buf;
    for (int sec = 0; sec < 4; ++sec) {
      out += fmt_fixed(s.obs.sector(Sector(sec)));
      out += ',';
    }
    out += to_string(s.obs.source);
    out += '\n';
  }
  return out;
}

int count_zero_crossings(const std::vector<double>& values) {
  int count = 0;
  int last_sign = 0;
  for (const double v : values) {
    const int sign = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    if (sign == 0) continue;
    if (last_sign != 0 && sign != last_sign) ++count;
    last_sign = sign;
  }
  return count;
}

ScenarioSummary summarize(const ScenarioResult& result) {
  ScenarioSummary out;
  if (result.samples.empty()) return out;

  std::vector<double> vx, vy;
  vx.reserve(result.samples.size());
  vy.reserve(result.samples.size());
  for (const TrajectorySample& s : result.samples) {
    out.min_forward_clearance_m = std::min(out.min_forward_clearance_m, s.obs.forward_m);
    out.oa_ever_engaged = out.oa_ever_engaged || s.state.oa_engaged;
    vx.push_back(s.state.velocity_mps.x);
    vy.push_back(s.state.velocity_mps.y);
  }
  out.forward_displacement_m =
      result.samples.back().state.position_m.y - result.samples.front().state.position_m.y;
  out.lateral_displacement_m =
      result.samples.back().state.position_m.x - result.samples.front().state.position_m.x;
  out.forward_zero_crossings = count_zero_crossings(vy);
  out.lateral_zero_crossings = count_zero_crossings(vx);
  return out;
}

}  // namespace stereospoof
