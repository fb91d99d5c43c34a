#pragma once

#include <cstdint>
#include <string>

#include "gridnav/planner.hpp"
#include "gridnav/world_model.hpp"

namespace gridnav {

enum class PlannerKind { Nbv, B35, B7 };

PlannerKind planner_kind_from(const std::string& token);  // throws on unknown
const char* to_string(PlannerKind k);

enum class Outcome { Success, Unreachable, Failure };

const char* to_string(Outcome o);

struct RobotState {
  Pose pose;
  double traveled = 0.0;  // m, summed executed arc length
  bool contact = false;   // last step was truncated at an obstacle
};

struct TrackConfig {
  double lookahead = 0.35;  // m along the path
  double v_max = 1.0;       // m/s
  double omega_max = 3.0;   // rad/s
  double radius = 0.43;     // collision radius against ground truth, m
  double heading_gain = 3.0;
};

/// One pure-pursuit step with exact unicycle integration. Speed scales
/// down linearly with |heading error| (zero at 90 degrees and beyond, so a
/// waypoint behind the robot produces rotation in place); motion is
/// truncated where the footprint circle would touch a ground-truth
/// obstacle. Requires a nonempty path and a robot heading.
RobotState track(const WorldModel& world, const RobotState& robot,
                 const Path& waypoints, double dt,
                 const TrackConfig& cfg = {});

struct RunConfig {
  WorldModel world;
  Pose start;
  GoalRegion goal;
  PlannerKind planner = PlannerKind::Nbv;
  NoiseParams noise;
  std::uint64_t seed = 0;
  double time_limit = 120.0;  // simulated seconds

  SensorSpec sensor;
  TrackConfig track;
  double dt = 0.05;             // s
  double scan_period = 0.5;     // s
  double plan_period = 1.0;     // s
  double baseline_mapping_range = 3.5;  // B3.5 scan cap, m
};

struct RunRecord {
  Outcome outcome = Outcome::Failure;
  double distance = 0.0;  // m
  double sim_time = 0.0;  // s
  std::string trace;      // planner trace, one line per cycle
};

/// Closed-loop run: sense -> integrate -> plan -> move at fixed periods,
/// deterministic for a given config and seed.
RunRecord run(const RunConfig& config);

}  // namespace gridnav
