#include "gridnav/planner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gridnav {

const char* to_string(PlannerState s) {
  switch (s) {
    case PlannerState::Stage1: return "stage1";
    case PlannerState::Stage2: return "stage2";
    case PlannerState::Stage3: return "stage3";
    case PlannerState::DoneSuccess: return "done_success";
    case PlannerState::DoneUnreachable: return "done_unreachable";
  }
  return "?";
}

bool check_goal_reachable(const OccupancyGrid& grid, const Pose& robot,
                          const GoalRegion& goal, const Footprint& footprint,
                          const CollisionPolicy& policy) {
  const MapView view = MapView::probabilistic(grid);
  try {
    return astar(view, robot, goal, footprint, policy).found();
  } catch (const std::invalid_argument&) {
    // Robot pose itself collides on the current snapshot; probe from the
    // nearest non-colliding neighbor cell instead.
    const GridSpec& spec = grid.spec();
    const CellIndex base = spec.cell_at(robot.position());
    for (int r = 1; r <= 2; ++r) {
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          if (chebyshev({dx, dy}, {0, 0}) != r) continue;
          const CellIndex c{base.cx + dx, base.cy + dy};
          if (!spec.in_bounds(c)) continue;
          const Pose p{spec.center(c).x, spec.center(c).y, std::nullopt};
          if (pose_collides(view, p, footprint, policy)) continue;
          return astar(view, p, goal, footprint, policy).found();
        }
      }
    }
    return false;
  }
}

namespace {

void append_trace(std::string& trace, double t, PlannerState state,
                  const std::string& event, double path_len) {
  std::ostringstream os;
  os << t << ' ' << to_string(state) << ' '
     << (event.empty() ? "-" : event) << ' ' << path_len << '\n';
  trace += os.str();
}

bool all_neighborhood_free(const OccupancyGrid& grid, const Path& path,
                           const Footprint& footprint) {
  const GridSpec& spec = grid.spec();
  for (const Pose& p : path.poses) {
    const CellIndex base = spec.cell_at(p.position());
    for (const CellIndex& o : footprint.offsets) {
      const CellIndex c{base.cx + o.cx, base.cy + o.cy};
      if (!spec.in_bounds(c)) return false;
      if (grid.classify(c) != CellClass::Free) return false;
    }
  }
  return true;
}

bool any_neighborhood_obstacle(const OccupancyGrid& grid, const Path& path,
                               const Footprint& footprint) {
  const GridSpec& spec = grid.spec();
  for (const Pose& p : path.poses) {
    const CellIndex base = spec.cell_at(p.position());
    for (const CellIndex& o : footprint.offsets) {
      const CellIndex c{base.cx + o.cx, base.cy + o.cy};
      if (!spec.in_bounds(c)) continue;
      if (grid.classify(c) == CellClass::Obstacle) return true;
    }
  }
  return false;
}

/// Snapshot for planning: marks Free every cell lying entirely inside the
/// robot's physical disc. The robot occupies that space, so those cells
/// cannot contain an obstacle, whatever stale or phantom evidence the map
/// holds (e.g. noise artifacts seen from afar and never re-observed).
/// Cells only partially covered are left alone — they may hold a wall the
/// robot is touching.
OccupancyGrid clear_under_robot(const OccupancyGrid& grid, const Pose& robot,
                                double robot_radius) {
  OccupancyGrid out = grid;
  const GridSpec& spec = out.spec();
  const double res = spec.resolution;
  const CellIndex base = spec.cell_at(robot.position());
  const int reach = static_cast<int>(std::ceil(robot_radius / res));
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      const CellIndex c{base.cx + dx, base.cy + dy};
      if (!spec.in_bounds(c)) continue;
      const Vec2 center = spec.center(c);
      const double far_x =
          std::abs(center.x - robot.x) + 0.5 * res;
      const double far_y =
          std::abs(center.y - robot.y) + 0.5 * res;
      if (std::sqrt(far_x * far_x + far_y * far_y) < robot_radius)
        out.set_probability(c, out.config().clamp_min);
    }
  }
  return out;
}

/// Recovery when the robot's own pose collides on the current snapshot
/// (typically after the tracker cut a corner tighter than the planning
/// footprint): a two-pose path from the robot to the nearest non-colliding
/// cell center, or an empty path when none exists nearby. Holding instead
/// would deadlock — the map under a stationary robot never changes.
Path escape_waypoints(const MapView& view, const Pose& robot,
                      const Footprint& footprint,
                      const CollisionPolicy& policy) {
  const GridSpec& spec = view.spec;
  const CellIndex base = spec.cell_at(robot.position());
  for (int r = 1; r <= 4; ++r) {
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        if (chebyshev({dx, dy}, {0, 0}) != r) continue;
        const CellIndex c{base.cx + dx, base.cy + dy};
        if (!spec.in_bounds(c)) continue;
        const Pose p{spec.center(c).x, spec.center(c).y, std::nullopt};
        if (pose_collides(view, p, footprint, policy)) continue;
        Path out;
        out.poses.push_back(robot);
        out.poses.push_back(p);
        return out;
      }
    }
  }
  return {};
}

/// The grid solution degenerates to the start pose alone when the robot's
/// own cell already satisfies the cell-level goal test while the robot
/// itself still sits outside the goal disc; steer to the goal center so the
/// tracker has something to chase.
Path with_goal_approach(Path path, const Pose& robot, const GoalRegion& goal) {
  if (path.size() > 1) return path;
  path.poses.clear();
  path.poses.push_back(robot);
  path.poses.push_back({goal.center.x, goal.center.y, std::nullopt});
  return path;
}

/// Greedy line-of-sight pruning: from each kept pose, jump to the farthest
/// later pose reachable along a straight collision-free segment. Tree-grown
/// paths zig-zag between motion primitives; following them verbatim wastes
/// travel, so the committed segment is straightened before tracking.
Path shortcut(const MapView& view, const Path& path, const Footprint& footprint,
              const CollisionPolicy& policy) {
  if (path.size() < 3) return path;
  auto segment_clear = [&](const Vec2& a, const Vec2& b) {
    const double len = distance(a, b);
    const int steps = std::max(1, static_cast<int>(std::ceil(len / 0.1)));
    for (int i = 0; i <= steps; ++i) {
      const Vec2 p = a + (b - a) * (static_cast<double>(i) / steps);
      if (pose_collides(view, {p.x, p.y, std::nullopt}, footprint, policy))
        return false;
    }
    return true;
  };
  Path out;
  std::size_t i = 0;
  out.poses.push_back(path.poses.front());
  while (i + 1 < path.size()) {
    std::size_t j = path.size() - 1;
    for (; j > i + 1; --j)
      if (segment_clear(path.poses[i].position(), path.poses[j].position()))
        break;
    out.poses.push_back(path.poses[j]);
    i = j;
  }
  return out;
}

const Path& shortest(const std::vector<Path>& paths) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < paths.size(); ++i)
    if (paths[i].length() < paths[best].length()) best = i;
  return paths[best];
}

}  // namespace

NbvPlanner::NbvPlanner(NbvPlannerConfig config, std::uint64_t seed)
    : cfg_(std::move(config)), primitives_(default_primitives()), rng_(seed) {}

CycleResult NbvPlanner::cycle(double t, const OccupancyGrid& grid,
                              const Pose& robot, const GoalRegion& goal) {
  CycleResult result;
  if (goal.contains(robot.position())) {
    state_ = PlannerState::DoneSuccess;
    result.state = state_;
    result.event = "goal_reached";
    append_trace(trace_, t, state_, result.event, 0.0);
    return result;
  }

  const OccupancyGrid snapshot =
      clear_under_robot(grid, robot, cfg_.robot_radius);
  switch (state_) {
    case PlannerState::Stage1:
      result = stage1(snapshot, robot, goal);
      break;
    case PlannerState::Stage2:
      result = stage2(snapshot, robot, goal);
      break;
    case PlannerState::Stage3:
      result = stage3(snapshot, robot, goal);
      break;
    default:
      result.state = state_;
      return result;
  }
  append_trace(trace_, t, result.state, result.event,
               result.waypoints.empty() ? 0.0 : result.waypoints.length());
  return result;
}

CycleResult NbvPlanner::to_stage3(const OccupancyGrid& grid, const Pose& robot,
                                  const GoalRegion& goal,
                                  const std::string& event) {
  state_ = PlannerState::Stage3;
  hypotheses_.clear();
  nbv_.reset();
  common_.reset();
  CycleResult r = stage3(grid, robot, goal);
  r.event = event.empty() ? r.event : event + "," + r.event;
  return r;
}

CycleResult NbvPlanner::stage1(const OccupancyGrid& grid, const Pose& robot,
                               const GoalRegion& goal) {
  CycleResult result;
  HypothesisSet hs;
  try {
    hs = plan_hypotheses(grid, robot, goal, cfg_.footprint, cfg_.hypotheses);
  } catch (const std::invalid_argument&) {
    // Robot pose collides on this snapshot: steer to a clear cell first.
    result.state = state_;
    result.event = "start_blocked";
    result.waypoints =
        escape_waypoints(MapView::probabilistic(grid), robot, cfg_.footprint,
                         cfg_.hypotheses.policy);
    return result;
  }
  if (hs.status == HypothesisStatus::GoalUnreachable) {
    state_ = PlannerState::DoneUnreachable;
    result.state = state_;
    result.event = "no_primary_hypothesis";
    return result;
  }
  if (!hs.needs_nbv)
    return to_stage3(grid, robot, goal, "single_hypothesis");

  // Two hypotheses: build candidate NBV poses and try to relink.
  const MapView view = MapView::probabilistic(grid);
  Rrt tree;
  try {
    tree = grow_rrt(view, robot, cfg_.nbv, primitives_, cfg_.footprint,
                    cfg_.hypotheses.policy, rng_);
  } catch (const std::invalid_argument&) {
    hypotheses_ = hs.paths;
    return to_stage3(grid, robot, goal, "rrt_root_blocked");
  }
  if (tree.nodes.size() < 2) {
    hypotheses_ = hs.paths;
    return to_stage3(grid, robot, goal, "no_candidates");
  }

  std::vector<CandidateView> views;
  views.reserve(tree.nodes.size() - 1);
  for (int i = 1; i < static_cast<int>(tree.nodes.size()); ++i) {
    CandidateView v;
    v.pose = tree.nodes[i].pose;
    v.tree_path = tree.path_to(i);
    v.index = i - 1;
    const auto cells = collect_cells(grid, hs.paths, v.pose, robot,
                                     cfg_.footprint, cfg_.sensor);
    const RawScore raw = score(cells, cfg_.nbv);
    v.j_entropy = raw.j_entropy;
    v.j_distance = raw.j_distance;
    views.push_back(std::move(v));
  }
  views = rank_candidates(std::move(views), cfg_.nbv);

  const RelinkResult rl =
      relink(view, grid, views, hs.paths, cfg_.nbv, primitives_,
             cfg_.footprint, cfg_.hypotheses.policy, rng_);
  if (!rl.ok) {
    hypotheses_ = hs.paths;
    return to_stage3(grid, robot, goal, "relink_failed");
  }

  state_ = PlannerState::Stage2;
  hypotheses_ = rl.hypotheses;
  nbv_ = rl.nbv;
  common_ = shortcut(view, rl.common, cfg_.footprint, cfg_.hypotheses.policy);
  stage2_last_pos_ = robot.position();
  stage2_stalled_ = 0;
  result.state = state_;
  result.event = "nbv_selected";
  result.waypoints = *common_;
  return result;
}

CycleResult NbvPlanner::stage2(const OccupancyGrid& grid, const Pose& robot,
                               const GoalRegion& goal) {
  if (!nbv_ || !common_ || hypotheses_.empty())
    throw std::logic_error("NbvPlanner: Stage2 without NBV context");

  const double pos_err = distance(robot.position(), nbv_->pose.position());
  double heading_err = 0.0;
  if (robot.theta && nbv_->pose.theta)
    heading_err = std::abs(angle_diff(*robot.theta, *nbv_->pose.theta));
  if (pos_err <= cfg_.arrive_position_tol &&
      heading_err <= cfg_.arrive_heading_tol)
    return commit_at_nbv(grid, robot, goal);

  // Progress watchdog: the committed segment is never replanned on the way
  // to the view pose, so a robot physically wedged against an obstacle the
  // grid path clipped would otherwise hold this state forever. After a few
  // cycles without movement the view is abandoned and planning restarts.
  if (distance(robot.position(), stage2_last_pos_) < 0.05) {
    if (++stage2_stalled_ >= 3) return to_stage3(grid, robot, goal, "nbv_stalled");
  } else {
    stage2_last_pos_ = robot.position();
    stage2_stalled_ = 0;
  }

  CycleResult result;
  result.state = state_;
  result.event = "to_nbv";
  result.waypoints = *common_;
  return result;
}

CycleResult NbvPlanner::commit_at_nbv(const OccupancyGrid& grid,
                                      const Pose& robot,
                                      const GoalRegion& goal) {
  // (i) a hypothesis whose cells are all Free is safe: commit to it.
  std::vector<Path> ordered = hypotheses_;
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Path& a, const Path& b) {
                     return a.length() < b.length();
                   });
  for (const Path& h : ordered) {
    if (all_neighborhood_free(grid, h, cfg_.footprint)) {
      hypotheses_ = {h};
      return to_stage3(grid, robot, goal, "commit_safe");
    }
  }

  // (ii) drop hypotheses that now cross an obstacle.
  std::vector<Path> kept;
  for (const Path& h : ordered)
    if (!any_neighborhood_obstacle(grid, h, cfg_.footprint))
      kept.push_back(h);

  if (kept.empty()) {
    // (iii) no hypothesis survived; re-verify reachability.
    if (!check_goal_reachable(grid, robot, goal, cfg_.footprint,
                              cfg_.hypotheses.policy)) {
      state_ = PlannerState::DoneUnreachable;
      return {{}, state_, "unreachable_at_nbv"};
    }
    return to_stage3(grid, robot, goal, "replan_at_nbv");
  }

  // (iv) recompute replacement hypotheses; replace only on strict
  // improvement in traversed unknown+uncertain cells.
  HypothesisSet fresh;
  try {
    fresh = plan_hypotheses(grid, robot, goal, cfg_.footprint,
                            cfg_.hypotheses);
  } catch (const std::invalid_argument&) {
    fresh.status = HypothesisStatus::GoalUnreachable;
  }
  if (fresh.status == HypothesisStatus::Ok) {
    std::vector<bool> used(fresh.paths.size(), false);
    for (Path& old : kept) {
      const int old_count =
          count_unknown_uncertain(grid, old, cfg_.footprint);
      int best = -1;
      int best_count = old_count;
      for (std::size_t i = 0; i < fresh.paths.size(); ++i) {
        if (used[i]) continue;
        const int c =
            count_unknown_uncertain(grid, fresh.paths[i], cfg_.footprint);
        if (c < best_count) {
          best_count = c;
          best = static_cast<int>(i);
        }
      }
      if (best >= 0) {
        used[best] = true;
        old = fresh.paths[best];
      }
    }
  }

  hypotheses_ = {shortest(kept)};
  return to_stage3(grid, robot, goal, "commit_shortest");
}

CycleResult NbvPlanner::stage3(const OccupancyGrid& grid, const Pose& robot,
                               const GoalRegion& goal) {
  CycleResult result;
  const MapView view = MapView::probabilistic(grid);
  try {
    const PlanResult plan =
        astar(view, robot, goal, cfg_.footprint, cfg_.hypotheses.policy);
    if (!plan.found()) {
      state_ = PlannerState::DoneUnreachable;
      result.state = state_;
      result.event = "no_path";
      return result;
    }
    result.state = state_;
    result.event = "follow";
    result.waypoints = with_goal_approach(plan.path, robot, goal);
  } catch (const std::invalid_argument&) {
    result.state = state_;
    result.event = "start_blocked";
    result.waypoints =
        escape_waypoints(view, robot, cfg_.footprint, cfg_.hypotheses.policy);
  }
  return result;
}

BaselinePlanner::BaselinePlanner(BaselineConfig config, Footprint footprint)
    : cfg_(config), footprint_(std::move(footprint)) {}

CycleResult BaselinePlanner::cycle(double t, const OccupancyGrid& grid,
                                   const Pose& robot, const GoalRegion& goal) {
  CycleResult result;
  if (goal.contains(robot.position())) {
    state_ = PlannerState::DoneSuccess;
    result.state = state_;
    result.event = "goal_reached";
    append_trace(trace_, t, state_, result.event, 0.0);
    return result;
  }
  if (state_ != PlannerState::Stage3) {
    result.state = state_;
    return result;
  }

  const OccupancyGrid snapshot = clear_under_robot(grid, robot, cfg_.robot_radius);
  const MapView view =
      MapView::binarized(snapshot, cfg_.occupancy_threshold);
  const CollisionPolicy policy{UnknownIs::Free, 0};
  try {
    const PlanResult plan = astar(view, robot, goal, footprint_, policy);
    if (!plan.found()) {
      state_ = PlannerState::DoneUnreachable;
      result.state = state_;
      result.event = "no_path";
    } else {
      result.state = state_;
      result.event = "follow";
      result.waypoints = with_goal_approach(plan.path, robot, goal);
    }
  } catch (const std::invalid_argument&) {
    result.state = state_;
    result.event = "start_blocked";
    result.waypoints = escape_waypoints(view, robot, footprint_, policy);
  }
  append_trace(trace_, t, result.state, result.event,
               result.waypoints.empty() ? 0.0 : result.waypoints.length());
  return result;
}

}  // namespace gridnav
