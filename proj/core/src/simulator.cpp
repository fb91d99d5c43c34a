#include "gridnav/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "gridnav/depth_sensor.hpp"

namespace gridnav {

PlannerKind planner_kind_from(const std::string& token) {
  if (token == "nbv") return PlannerKind::Nbv;
  if (token == "b35") return PlannerKind::B35;
  if (token == "b7") return PlannerKind::B7;
  throw std::invalid_argument("unknown planner: " + token);
}

const char* to_string(PlannerKind k) {
  switch (k) {
    case PlannerKind::Nbv: return "nbv";
    case PlannerKind::B35: return "b35";
    case PlannerKind::B7: return "b7";
  }
  return "?";
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Success: return "success";
    case Outcome::Unreachable: return "unreachable";
    case Outcome::Failure: return "failure";
  }
  return "?";
}

namespace {

/// Point 'lookahead' meters past the robot's closest projection onto the
/// path; the final pose once the path runs out.
Vec2 lookahead_point(const Path& path, const Vec2& robot, double lookahead) {
  if (path.size() == 1) return path.front().position();

  // Closest projection over all segments; later segments win ties so the
  // robot keeps moving forward once it reaches a vertex.
  std::size_t best_seg = 0;
  double best_u = 0.0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const Vec2 a = path.poses[i].position();
    const Vec2 b = path.poses[i + 1].position();
    const Vec2 ab = b - a;
    const double len2 = ab.dot(ab);
    double u = len2 > 0.0 ? (robot - a).dot(ab) / len2 : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    const double d = distance(a + ab * u, robot);
    if (d <= best_d) {
      best_d = d;
      best_seg = i;
      best_u = u;
    }
  }

  double remaining = lookahead;
  Vec2 cur = path.poses[best_seg].position() +
             (path.poses[best_seg + 1].position() -
              path.poses[best_seg].position()) *
                 best_u;
  for (std::size_t i = best_seg; i + 1 < path.size(); ++i) {
    const Vec2 b = path.poses[i + 1].position();
    const double seg = distance(cur, b);
    if (seg >= remaining) {
      if (seg <= 0.0) return b;
      return cur + (b - cur) * (remaining / seg);
    }
    remaining -= seg;
    cur = b;
  }
  return path.back().position();
}

Pose integrate_unicycle(const Pose& from, double v, double omega, double dt) {
  const double th = *from.theta;
  Pose out;
  if (std::abs(omega) < 1e-12) {
    out.x = from.x + v * dt * std::cos(th);
    out.y = from.y + v * dt * std::sin(th);
    out.theta = th;
  } else {
    const double r = v / omega;
    out.x = from.x + r * (std::sin(th + omega * dt) - std::sin(th));
    out.y = from.y - r * (std::cos(th + omega * dt) - std::cos(th));
    out.theta = wrap_angle(th + omega * dt);
  }
  return out;
}

bool collides_truth(const WorldModel& world, const Vec2& p, double radius) {
  return world.obstacle_clearance(p) < radius;
}

}  // namespace

RobotState track(const WorldModel& world, const RobotState& robot,
                 const Path& waypoints, double dt, const TrackConfig& cfg) {
  if (waypoints.empty())
    throw std::invalid_argument("track: empty waypoint path");
  if (!robot.pose.theta)
    throw std::invalid_argument("track: robot needs a heading");

  const Vec2 target =
      lookahead_point(waypoints, robot.pose.position(), cfg.lookahead);
  const Vec2 rel = target - robot.pose.position();

  double v = 0.0;
  double omega = 0.0;
  if (rel.norm() > 1e-9) {
    const double err =
        angle_diff(std::atan2(rel.y, rel.x), *robot.pose.theta);
    omega = std::clamp(cfg.heading_gain * err, -cfg.omega_max, cfg.omega_max);
    v = cfg.v_max * std::max(0.0, 1.0 - std::abs(err) / (M_PI / 2.0));
  }

  RobotState out = robot;
  out.contact = false;
  // A position collides when it is inside the contact ring and closer to
  // the obstacle than where the robot already is; motion that maintains or
  // regains clearance is always allowed, so a robot touching a wall can
  // slide along it or back away instead of deadlocking.
  const double here = world.obstacle_clearance(robot.pose.position());
  auto blocked = [&](const Vec2& p) {
    const double c = world.obstacle_clearance(p);
    return c < cfg.radius && c < here;
  };
  Pose next = integrate_unicycle(robot.pose, v, omega, dt);
  if (v > 0.0 && blocked(next.position())) {
    // Largest unblocked fraction of the step, by bisection.
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 30; ++i) {
      const double mid = 0.5 * (lo + hi);
      const Pose p = integrate_unicycle(robot.pose, v, omega, dt * mid);
      if (blocked(p.position()))
        hi = mid;
      else
        lo = mid;
    }
    next = integrate_unicycle(robot.pose, v, omega, dt * lo);
    // Rotation in place is always collision-free for a disc robot, so the
    // heading completes the full step even when translation is truncated;
    // otherwise a robot wedged against a corner could never turn away.
    next.theta = wrap_angle(*robot.pose.theta + omega * dt);
    out.contact = true;
    double moved = v * dt * lo;
    if (lo < 0.1) {
      // The arc is pinned against the contact. Slide along the obstacle
      // instead: drop the motion component pointing into the surface
      // (estimated from the clearance gradient) and keep the tangential
      // remainder, again truncated to its largest unblocked fraction.
      const Vec2 pos = robot.pose.position();
      const double e = 1e-4;
      Vec2 grad{(world.obstacle_clearance({pos.x + e, pos.y}) -
                 world.obstacle_clearance({pos.x - e, pos.y})) /
                    (2.0 * e),
                (world.obstacle_clearance({pos.x, pos.y + e}) -
                 world.obstacle_clearance({pos.x, pos.y - e})) /
                    (2.0 * e)};
      const double gn = grad.norm();
      const Vec2 dir{std::cos(*next.theta), std::sin(*next.theta)};
      if (gn > 1e-9) {
        const Vec2 n = grad * (1.0 / gn);
        const Vec2 slide = dir - n * (dir.x * n.x + dir.y * n.y);
        const double sn = slide.norm();
        if (sn > 1e-6) {
          double slo = 0.0, shi = 1.0;
          auto at = [&](double u) {
            return Vec2{pos.x + slide.x * v * dt * u,
                        pos.y + slide.y * v * dt * u};
          };
          if (!blocked(at(1.0))) {
            slo = 1.0;
          } else {
            for (int i = 0; i < 30; ++i) {
              const double mid = 0.5 * (slo + shi);
              if (blocked(at(mid)))
                shi = mid;
              else
                slo = mid;
            }
          }
          if (slo * sn > lo) {
            const Vec2 p = at(slo);
            next.x = p.x;
            next.y = p.y;
            moved = v * dt * slo * sn;
          }
        }
      }
    }
    out.traveled += moved;
  } else {
    out.traveled += v * dt;
  }
  out.pose = next;
  return out;
}

namespace {

GridSpec grid_spec_for(const WorldModel& world, double resolution) {
  GridSpec spec;
  spec.resolution = resolution;
  spec.origin = {world.bounds.x0, world.bounds.y0};
  spec.width = static_cast<int>(
      std::ceil((world.bounds.x1 - world.bounds.x0) / resolution - 1e-9));
  spec.height = static_cast<int>(
      std::ceil((world.bounds.y1 - world.bounds.y0) / resolution - 1e-9));
  return spec;
}

/// Emulates a shorter mapping range: beams beyond the cap become pure
/// clearing rays truncated at the cap.
DepthScan cap_scan(DepthScan scan, double cap) {
  scan.max_range = cap;
  for (double& r : scan.ranges)
    if (std::isfinite(r) && r > cap) r = DepthScan::kMaxRange;
  return scan;
}

}  // namespace

RunRecord run(const RunConfig& config) {
  const WorldModel& world = config.world;
  OccupancyGrid grid(grid_spec_for(world, 0.25));

  std::mt19937_64 sensor_rng(config.seed);
  const std::uint64_t planner_seed =
      config.seed ^ 0x9e3779b97f4a7c15ull;

  // Planning footprint: the robot circle plus half a cell diagonal of
  // tracking slack, so grid-feasible paths are physically traversable.
  const Footprint plan_footprint = Footprint::disc(
      config.track.radius + 0.25 * grid.spec().resolution,
      grid.spec().resolution);

  std::unique_ptr<NbvPlanner> nbv;
  std::unique_ptr<BaselinePlanner> baseline;
  double scan_cap = config.sensor.max_range;
  if (config.planner == PlannerKind::Nbv) {
    NbvPlannerConfig pc;
    pc.sensor = config.sensor;
    pc.footprint = plan_footprint;
    pc.robot_radius = config.track.radius;
    nbv = std::make_unique<NbvPlanner>(pc, planner_seed);
  } else {
    BaselineConfig bc;
    bc.robot_radius = config.track.radius;
    bc.mapping_range = config.planner == PlannerKind::B35
                           ? config.baseline_mapping_range
                           : config.sensor.max_range;
    baseline = std::make_unique<BaselinePlanner>(bc, plan_footprint);
    scan_cap = bc.mapping_range;
  }

  RobotState robot;
  robot.pose = config.start;

  RunRecord record;
  Path current;
  const int steps_per_scan =
      std::max(1, static_cast<int>(std::lround(config.scan_period / config.dt)));
  const int steps_per_plan =
      std::max(1, static_cast<int>(std::lround(config.plan_period / config.dt)));
  const int total_steps =
      static_cast<int>(std::lround(config.time_limit / config.dt));

  for (int step = 0; step <= total_steps; ++step) {
    const double t = step * config.dt;
    record.sim_time = t;

    if (config.goal.contains(robot.pose.position())) {
      record.outcome = Outcome::Success;
      break;
    }
    if (step == total_steps) {
      record.outcome = Outcome::Failure;
      break;
    }

    if (step % steps_per_scan == 0) {
      DepthScan scan =
          sense(world, robot.pose, config.sensor, config.noise, sensor_rng);
      if (scan_cap < config.sensor.max_range) scan = cap_scan(scan, scan_cap);
      grid.integrate_scan(robot.pose, scan);
    }

    if (step % steps_per_plan == 0) {
      const CycleResult cycle =
          nbv ? nbv->cycle(t, grid, robot.pose, config.goal)
              : baseline->cycle(t, grid, robot.pose, config.goal);
      if (cycle.state == PlannerState::DoneSuccess) {
        record.outcome = Outcome::Success;
        break;
      }
      if (cycle.state == PlannerState::DoneUnreachable) {
        record.outcome = Outcome::Unreachable;
        break;
      }
      current = cycle.waypoints;  // empty => hold until the next cycle
    }

    if (!current.empty()) robot = track(world, robot, current, config.dt,
                                        config.track);
  }

  record.distance = robot.traveled;
  record.trace = nbv ? nbv->trace() : baseline->trace();
  return record;
}

}  // namespace gridnav
