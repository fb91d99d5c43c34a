#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "gridnav/nbv.hpp"
#include "gridnav/search.hpp"

namespace gridnav {

enum class PlannerState {
  Stage1,
  Stage2,
  Stage3,
  DoneSuccess,
  DoneUnreachable,
};

const char* to_string(PlannerState s);

struct CycleResult {
  Path waypoints;
  PlannerState state = PlannerState::Stage1;
  std::string event;
};

/// Goal reachability under the optimistic unknown-as-free policy with the
/// uncertain-cell budget. When the robot's own pose collides the check is
/// run from the nearest non-colliding neighbor cell.
bool check_goal_reachable(const OccupancyGrid& grid, const Pose& robot,
                          const GoalRegion& goal, const Footprint& footprint,
                          const CollisionPolicy& policy);

struct NbvPlannerConfig {
  NbvConfig nbv;
  HypothesisConfig hypotheses;
  Footprint footprint = Footprint::block3x3();
  SensorSpec sensor;
  double arrive_position_tol = 0.15;  // m
  double arrive_heading_tol = M_PI;   // rad; arrival is position-based
  double robot_radius = 0.43;  // m; physical disc, for map self-clearing
};

/// Three-stage NBV planner state machine. One instance drives one run;
/// cycle() is called at the replan frequency with the latest grid snapshot.
class NbvPlanner {
 public:
  NbvPlanner(NbvPlannerConfig config, std::uint64_t seed);

  CycleResult cycle(double t, const OccupancyGrid& grid, const Pose& robot,
                    const GoalRegion& goal);

  PlannerState state() const { return state_; }
  const std::string& trace() const { return trace_; }

 private:
  CycleResult stage1(const OccupancyGrid& grid, const Pose& robot,
                     const GoalRegion& goal);
  CycleResult stage2(const OccupancyGrid& grid, const Pose& robot,
                     const GoalRegion& goal);
  CycleResult stage3(const OccupancyGrid& grid, const Pose& robot,
                     const GoalRegion& goal);
  CycleResult commit_at_nbv(const OccupancyGrid& grid, const Pose& robot,
                            const GoalRegion& goal);
  CycleResult to_stage3(const OccupancyGrid& grid, const Pose& robot,
                        const GoalRegion& goal, const std::string& event);

  NbvPlannerConfig cfg_;
  std::vector<MotionPrimitive> primitives_;
  std::mt19937_64 rng_;
  PlannerState state_ = PlannerState::Stage1;

  // Stage 2 context: hypotheses plus the committed common segment.
  std::vector<Path> hypotheses_;
  std::optional<CandidateView> nbv_;
  std::optional<Path> common_;
  // Progress watchdog for the approach to the view pose: consecutive
  // cycles without meaningful movement before the view is abandoned.
  Vec2 stage2_last_pos_;
  int stage2_stalled_ = 0;

  std::string trace_;
};

struct BaselineConfig {
  double mapping_range = 3.5;  // 3.5 for B3.5, 7.0 for B7
  double occupancy_threshold = 0.3;
  double robot_radius = 0.43;  // m; physical disc, for map self-clearing
};

/// Traditional single-path planner: binarizes the map with one threshold,
/// treats unknown space as free, and replans with A* every cycle.
class BaselinePlanner {
 public:
  BaselinePlanner(BaselineConfig config, Footprint footprint);

  CycleResult cycle(double t, const OccupancyGrid& grid, const Pose& robot,
                    const GoalRegion& goal);

  PlannerState state() const { return state_; }
  const std::string& trace() const { return trace_; }

 private:
  BaselineConfig cfg_;
  Footprint footprint_;
  PlannerState state_ = PlannerState::Stage3;
  std::string trace_;
};

}  // namespace gridnav
