#pragma once

#include <functional>

#include "gridnav/occupancy_grid.hpp"
#include "gridnav/types.hpp"

namespace gridnav {

/// Classification view over a grid. The NBV planner queries the four-way
/// classification directly; the baselines use a single-threshold binarized
/// view over the same snapshot.
struct MapView {
  GridSpec spec;
  std::function<CellClass(const CellIndex&)> classify;

  static MapView probabilistic(const OccupancyGrid& grid);
  /// Cells with p >= threshold are Obstacle, everything else (including
  /// Unknown) is Free.
  static MapView binarized(const OccupancyGrid& grid, double threshold);
};

/// True iff any footprint cell is an Obstacle, or Unknown while the policy
/// treats unknown as obstacle, or more than uncertain_budget cells are
/// Uncertain. Out-of-bounds footprint cells count as Obstacle.
bool pose_collides(const MapView& view, const Pose& pose,
                   const Footprint& footprint, const CollisionPolicy& policy);
bool pose_collides(const OccupancyGrid& grid, const Pose& pose,
                   const Footprint& footprint, const CollisionPolicy& policy);

enum class PlanStatus { Found, NoPath };

struct PlanResult {
  PlanStatus status = PlanStatus::NoPath;
  Path path;
  double cost_cells = 0.0;  // octile path cost in cell units

  bool found() const { return status == PlanStatus::Found; }
};

/// 8-connected A* over cell centers (straight cost 1, diagonal sqrt(2),
/// octile-admissible heuristic), terminating on the first expansion whose
/// center lies inside the goal region. Ties on f are broken by larger g,
/// then row-major cell index, for cross-platform determinism.
/// Throws std::invalid_argument when the start pose itself collides.
PlanResult astar(const MapView& view, const Pose& start, const GoalRegion& goal,
                 const Footprint& footprint, const CollisionPolicy& policy);

struct HypothesisConfig {
  CollisionPolicy policy;
  int d_hyp = 4;  // Manhattan masking distance, cells
};

enum class HypothesisStatus { Ok, GoalUnreachable };

struct HypothesisSet {
  HypothesisStatus status = HypothesisStatus::GoalUnreachable;
  std::vector<Path> paths;  // 1 or 2, primary hypothesis first
  bool needs_nbv = false;
};

/// Stage 1 hypothesis generation: plans the primary hypothesis with
/// unknown-as-free, and when it traverses Unknown/Uncertain neighborhood
/// cells, plans an alternative on a snapshot where those cells are dilated
/// into obstacles by d_hyp.
HypothesisSet plan_hypotheses(const OccupancyGrid& grid, const Pose& start,
                              const GoalRegion& goal,
                              const Footprint& footprint,
                              const HypothesisConfig& config);

/// Count of Unknown plus Uncertain cells over all pose neighborhoods of a
/// path (each cell counted once); the hypothesis improvement metric.
int count_unknown_uncertain(const OccupancyGrid& grid, const Path& path,
                            const Footprint& footprint);

}  // namespace gridnav
