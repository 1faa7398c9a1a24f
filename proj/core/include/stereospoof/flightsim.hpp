#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "stereospoof/errors.hpp"
#include "stereospoof/geometry.hpp"
#include "stereospoof/matching.hpp"

namespace stereospoof {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
  bool operator==(const Vec3&) const = default;
};

enum class FlightMode { Positioning, ActiveTrack };
enum class Sector { Forward, Backward, Left, Right };
enum class ObservationSource { TrueScene, Manipulated };

const char* to_string(FlightMode m);
const char* to_string(Sector s);
const char* to_string(ObservationSource s);
FlightMode flight_mode_from_string(const std::string& name);
Sector sector_from_string(const std::string& name);

// World frame: x east, y north, z up. The body frame at heading 0 faces
// north, so a pilot command is (x right, y forward, z up); heading rotates
// the body axes clockwise (toward east) about z.
struct DroneState {
  Vec3 position_m;
  Vec3 velocity_mps;  // world frame
  double heading_rad = 0.0;
  FlightMode mode = FlightMode::Positioning;
  bool oa_engaged = false;
};

// Nearest-obstacle depth per horizontal body sector; kClear (infinity) when
// nothing is in range.
struct DepthObservation {
  static constexpr double kClear = std::numeric_limits<double>::infinity();

  double forward_m = kClear;
  double backward_m = kClear;
  double left_m = kClear;
  double right_m = kClear;
  ObservationSource source = ObservationSource::TrueScene;

  double sector(Sector s) const;
  double& sector(Sector s);
};

struct SimConfig {
  double dt_s = 0.02;
  double tau_s = 0.3;           // first-order velocity tracking time constant
  double max_speed_mps = 5.0;
  double oa_threshold_m = 6.0;  // sector depths below this engage avoidance
  double v_avoid_mps = 1.0;     // ActiveTrack retreat speed away from a blocked sector

  void validate() const;  // throws ConfigError
};

// One controller tick of length dt_s. The pilot command is body-frame.
// Both modes: the velocity relaxes toward the target command with time
// constant tau, and any component the pilot pushes toward a sector closer
// than oa_threshold_m is clamped to zero while still positive (brake).
// ActiveTrack additionally overrides the target on an axis with a blocked
// sector to v_avoid_mps pointing away from it (both sides blocked cancel to
// a hover on that axis). Speed is clamped to max_speed_mps, position is
// integrated with the updated velocity, altitude stays >= 0, and oa_engaged
// reports whether any sector was below the threshold. Throws DomainError
// unless 0 < dt_s <= 0.1.
DroneState step(const DroneState& state, const Vec3& pilot_cmd_mps, const DepthObservation& obs,
                double dt_s, const SimConfig& cfg = {});

struct InjectionEvent {
  double t_start_s = 0.0;
  double t_end_s = 0.0;       // active over the half-open window [t_start, t_end)
  Sector sector = Sector::Forward;
  double fake_depth_m = 0.0;  // NaN marks an unresolved "auto" depth
  bool mask_truth = false;    // replace the true depth instead of min-combining
};

struct InjectionSchedule {
  std::vector<InjectionEvent> events;
  double repeat_period_s = 0.0;  // > 0 tiles the schedule; events must fit in one period

  // Windows must be non-empty, non-negative, inside the repeat period when
  // one is set, and non-overlapping per sector. Throws ScheduleError.
  void validate() const;
};

// Applies every event active at time t to the true observation: the sector
// depth becomes min(true, fake), or exactly fake for mask_truth events.
// source flips to Manipulated when any event is active.
DepthObservation manipulate(const DepthObservation& obs_true, const InjectionSchedule& sched,
                            double t_s);

struct PilotSegment {
  double t_s = 0.0;  // command holds from here until the next segment
  Vec3 cmd_mps;      // body frame: x right, y forward, z up
};

// Optional image-pipeline source for "auto" fake depths: the scenario runs
// render -> composite -> match -> blob analysis once on the night wall scene
// with the default rig, and the measured blob depth becomes the injected
// value.
struct RenderedAttackSpec {
  bool enabled = false;
  double separation_m = 1.0;
  double distance_m = 4.0;
  AttackMode mode = AttackMode::Beams;
  AttackPattern pattern = AttackPattern::XShape;
  MatchAlgorithm algorithm = MatchAlgorithm::SemiGlobal;
};

struct Scenario {
  std::string name = "scenario";
  FlightMode mode = FlightMode::Positioning;
  double duration_s = 10.0;
  SimConfig config;
  uint64_t seed = 0;
  Vec3 start_position_m;
  std::vector<PilotSegment> pilot;  // piecewise-constant, times non-decreasing
  DepthObservation true_sectors;    // static scene depths
  InjectionSchedule schedule;
  RenderedAttackSpec rendered;

  void validate() const;  // throws ConfigError / ScheduleError
};

struct TrajectorySample {
  double t_s = 0.0;
  DroneState state;      // state at t_s (before the step taken at t_s)
  DepthObservation obs;  // manipulated observation the controller saw at t_s
};

struct ScenarioResult {
  Scenario scenario;  // as run, with auto depths resolved
  std::vector<TrajectorySample> samples;
};

// Key = value scenario text. '#' starts a comment; blank lines are skipped.
// Keys: name, mode (positioning|active_track), duration_s, dt_s, tau_s,
// max_speed_mps, oa_threshold_m, v_avoid_mps, seed, start (x y z),
// pilot (t x y z), sector (<name> <depth|inf>),
// inject (t0 t1 <sector> <depth|auto> [min|mask]), repeat_period_s,
// render_attack (<separation> <distance> <mode> <pattern> <algorithm>).
// Throws ParseError with the 1-based line number.
Scenario parse_scenario(const std::string& text, const std::string& default_name = "scenario");
Scenario load_scenario_file(const std::string& path);  // adds IoError on read failure

// Canonical text for a scenario; parse_scenario(scenario_to_text(s)) == s.
std::string scenario_to_text(const Scenario& scenario);

// Named demo scenarios: sudden_stop, drift_away, shake_fb, shake_lr.
// period_s sets the injection on/off cycle of the shake scenarios.
Scenario builtin_scenario(const std::string& name, double period_s = 0.5);
std::vector<std::string> builtin_scenario_names();

// Fixed-step simulation: samples at t = 0, dt, ..., duration (the state
// logged at t is the state before the step taken at t). Deterministic:
// equal scenarios produce equal results.
ScenarioResult run_scenario(const Scenario& scenario);

// CSV with a '#' header block echoing the full scenario (parseable by
// parse_scenario after stripping the leading "# "), then one row per sample.
std::string trajectory_to_csv(const ScenarioResult& result);

// Sign flips of consecutive values, zeros bridged (+,0,- counts once).
int count_zero_crossings(const std::vector<double>& values);

struct ScenarioSummary {
  double min_forward_clearance_m = DepthObservation::kClear;
  double forward_displacement_m = 0.0;  // world y, final minus initial
  double lateral_displacement_m = 0.0;  // world x, final minus initial
  int forward_zero_crossings = 0;       // on world vy
  int lateral_zero_crossings = 0;       // on world vx
  bool oa_ever_engaged = false;
};

ScenarioSummary summarize(const ScenarioResult& result);

}  // namespace stereospoof
