#include "gridnav/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>
#include <stdexcept>

namespace gridnav {

void dump_path(std::ostream& os, const Path& path) {
  for (const Pose& p : path.poses) {
    os << p.x << ' ' << p.y << ' ';
    if (p.theta)
      os << *p.theta;
    else
      os << "nan";
    os << '\n';
  }
}

MapView MapView::probabilistic(const OccupancyGrid& grid) {
  return {grid.spec(),
          [&grid](const CellIndex& c) { return grid.classify(c); }};
}

MapView MapView::binarized(const OccupancyGrid& grid, double threshold) {
  return {grid.spec(), [&grid, threshold](const CellIndex& c) {
            if (!grid.known(c)) return CellClass::Free;
            return grid.probability(c) >= threshold ? CellClass::Obstacle
                                                    : CellClass::Free;
          }};
}

bool pose_collides(const MapView& view, const Pose& pose,
                   const Footprint& footprint, const CollisionPolicy& policy) {
  const CellIndex base = view.spec.cell_at(pose.position());
  int uncertain = 0;
  for (const CellIndex& o : footprint.offsets) {
    const CellIndex c{base.cx + o.cx, base.cy + o.cy};
    if (!view.spec.in_bounds(c)) return true;
    switch (view.classify(c)) {
      case CellClass::Obstacle:
        return true;
      case CellClass::Unknown:
        if (policy.treat_unknown_as == UnknownIs::Obstacle) return true;
        break;
      case CellClass::Uncertain:
        if (++uncertain > policy.uncertain_budget) return true;
        break;
      case CellClass::Free:
        break;
    }
  }
  return false;
}

bool pose_collides(const OccupancyGrid& grid, const Pose& pose,
                   const Footprint& footprint, const CollisionPolicy& policy) {
  return pose_collides(MapView::probabilistic(grid), pose, footprint, policy);
}

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

double octile(const CellIndex& a, const CellIndex& b) {
  const int dx = std::abs(a.cx - b.cx);
  const int dy = std::abs(a.cy - b.cy);
  return (dx + dy) + (kSqrt2 - 2.0) * std::min(dx, dy);
}

struct QueueEntry {
  double f;
  double g;
  int flat;

  // min-heap on f; ties prefer larger g, then smaller row-major index
  bool operator<(const QueueEntry& o) const {
    if (f != o.f) return f > o.f;
    if (g != o.g) return g < o.g;
    return flat > o.flat;
  }
};

}  // namespace

PlanResult astar(const MapView& view, const Pose& start, const GoalRegion& goal,
                 const Footprint& footprint, const CollisionPolicy& policy) {
  if (pose_collides(view, start, footprint, policy))
    throw std::invalid_argument("astar: start pose collides");

  const GridSpec& spec = view.spec;
  const CellIndex start_cell = spec.cell_at(start.position());
  const int n = spec.cell_count();

  // -1 unchecked, 0 free, 1 blocked
  std::vector<signed char> blocked(n, -1);
  auto is_blocked = [&](const CellIndex& c) {
    signed char& b = blocked[spec.flat(c)];
    if (b < 0) {
      const Pose p{spec.center(c).x, spec.center(c).y, std::nullopt};
      b = pose_collides(view, p, footprint, policy) ? 1 : 0;
    }
    return b == 1;
  };

  auto in_goal = [&](const CellIndex& c) {
    return goal.contains(spec.center(c));
  };
  // Admissible heuristic: Euclidean distance to the goal disc, in cells.
  const double goal_radius_cells = goal.radius / spec.resolution;
  auto heuristic = [&](const CellIndex& c) {
    const double d =
        distance(spec.center(c), goal.center) / spec.resolution;
    return std::max(0.0, d - goal_radius_cells);
  };

  std::vector<double> g_cost(n, std::numeric_limits<double>::infinity());
  std::vector<int> parent(n, -1);
  std::vector<char> closed(n, 0);
  std::priority_queue<QueueEntry> open;

  const int s = spec.flat(start_cell);
  g_cost[s] = 0.0;
  open.push({heuristic(start_cell), 0.0, s});

  int goal_flat = -1;
  while (!open.empty()) {
    const QueueEntry top = open.top();
    open.pop();
    if (closed[top.flat]) continue;
    closed[top.flat] = 1;
    const CellIndex cur{top.flat % spec.width, top.flat / spec.width};
    if (in_goal(cur)) {
      goal_flat = top.flat;
      break;
    }
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const CellIndex nb{cur.cx + dx, cur.cy + dy};
        if (!spec.in_bounds(nb)) continue;
        const int nf = spec.flat(nb);
        if (closed[nf] || is_blocked(nb)) continue;
        const double step = (dx != 0 && dy != 0) ? kSqrt2 : 1.0;
        const double ng = g_cost[top.flat] + step;
        if (ng < g_cost[nf]) {
          g_cost[nf] = ng;
          parent[nf] = top.flat;
          open.push({ng + heuristic(nb), ng, nf});
        }
      }
    }
  }

  PlanResult result;
  if (goal_flat < 0) return result;

  std::vector<CellIndex> cells;
  for (int f = goal_flat; f >= 0; f = parent[f])
    cells.push_back({f % spec.width, f / spec.width});
  std::reverse(cells.begin(), cells.end());

  result.status = PlanStatus::Found;
  result.cost_cells = g_cost[goal_flat];
  result.path.poses.reserve(cells.size());
  result.path.poses.push_back(start);
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const Vec2 c = spec.center(cells[i]);
    result.path.poses.push_back({c.x, c.y, std::nullopt});
  }
  return result;
}

int count_unknown_uncertain(const OccupancyGrid& grid, const Path& path,
                            const Footprint& footprint) {
  const GridSpec& spec = grid.spec();
  std::vector<char> seen(spec.cell_count(), 0);
  int count = 0;
  for (const Pose& p : path.poses) {
    const CellIndex base = spec.cell_at(p.position());
    for (const CellIndex& o : footprint.offsets) {
      const CellIndex c{base.cx + o.cx, base.cy + o.cy};
      if (!spec.in_bounds(c) || seen[spec.flat(c)]) continue;
      seen[spec.flat(c)] = 1;
      const CellClass k = grid.classify(c);
      if (k == CellClass::Unknown || k == CellClass::Uncertain) ++count;
    }
  }
  return count;
}

HypothesisSet plan_hypotheses(const OccupancyGrid& grid, const Pose& start,
                              const GoalRegion& goal,
                              const Footprint& footprint,
                              const HypothesisConfig& config) {
  HypothesisSet out;
  const MapView view = MapView::probabilistic(grid);
  const PlanResult primary = astar(view, start, goal, footprint, config.policy);
  if (!primary.found()) {
    out.status = HypothesisStatus::GoalUnreachable;
    return out;
  }
  out.status = HypothesisStatus::Ok;
  out.paths.push_back(primary.path);

  if (count_unknown_uncertain(grid, primary.path, footprint) == 0) {
    out.needs_nbv = false;  // safe path, proceed directly to Stage 3
    return out;
  }

  OccupancyGrid masked = grid;  // snapshot copy
  masked.mask_hypothesis_region(primary.path, config.d_hyp, start,
                                primary.path.back(), footprint);
  try {
    const PlanResult alt = astar(MapView::probabilistic(masked), start, goal,
                                 footprint, config.policy);
    if (alt.found()) {
      out.paths.push_back(alt.path);
      out.needs_nbv = true;
    }
  } catch (const std::invalid_argument&) {
    // masking can seal the start pose; treat as no second hypothesis
  }
  return out;
}

}  // namespace gridnav
