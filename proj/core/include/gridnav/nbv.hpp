#pragma once

#include <random>
#include <span>
#include <vector>

#include "gridnav/depth_scan.hpp"
#include "gridnav/search.hpp"

namespace gridnav {

struct NbvConfig {
  double alpha = 0.5;        // entropy vs distance weight
  double beta = 2.0;         // hypothesis rank exponent
  double gamma = 0.05;       // visibility floor for the distance term
  int candidates = 200;      // |P|
  double rrt_radius = 2.0;   // meters
  int relink_attempts = 7;   // N_REL
  int expansion_factor = 20; // RRT iteration budget = factor * candidates
  int relink_budget = 500;   // RRT expansions per relink attempt
  double arc_step = 0.125;   // collision sampling step along primitives, m
};

/// Forward arc with fixed curvature; the primitive set spans straight
/// motion to tight turns for a differential-drive footprint.
struct MotionPrimitive {
  double curvature = 0.0;  // 1/m, signed
  double length = 0.5;     // m
};

std::vector<MotionPrimitive> default_primitives();

/// Applies an arc primitive to a pose (theta required).
Pose apply_primitive(const Pose& from, const MotionPrimitive& prim,
                     double fraction = 1.0);

struct RrtNode {
  Pose pose;
  int parent = -1;
  std::vector<Pose> arc;  // sampled poses along the incoming primitive
};

struct Rrt {
  std::vector<RrtNode> nodes;  // nodes[0] is the root

  /// Pose sequence from the root to a node, including arc samples.
  Path path_to(int index) const;
};

/// Grows an RRT of kinematically feasible, collision-free poses within
/// rrt_radius of the root. Stops once config.candidates non-root nodes
/// exist or the expansion budget runs out. Throws if the root collides.
Rrt grow_rrt(const MapView& view, const Pose& root, const NbvConfig& config,
             std::span<const MotionPrimitive> primitives,
             const Footprint& footprint, const CollisionPolicy& policy,
             std::mt19937_64& rng);

/// One Unknown/Uncertain cell relevant to a candidate view.
struct ScoredCell {
  CellIndex cell;
  double entropy = 0.0;
  double visibility = 0.0;
  int rank = 1;                 // k(c), 1-based by hypothesis path length
  double dist_robot = 0.0;      // d(c)
  double dist_candidate = 0.0;  // d(c, p_NBV)
};

/// Cells that are Unknown or Uncertain, lie in some hypothesis pose
/// neighborhood, and fall inside the candidate's FOV and max range.
/// Hypotheses must be given in the caller's order; rank is assigned by
/// path length (a cell on several hypotheses gets the best rank).
std::vector<ScoredCell> collect_cells(const OccupancyGrid& grid,
                                      const std::vector<Path>& hypotheses,
                                      const Pose& candidate, const Pose& robot,
                                      const Footprint& footprint,
                                      const SensorSpec& sensor);

/// Raw objective terms (J_H, J_d) for one candidate's cell set.
struct RawScore {
  double j_entropy = 0.0;
  double j_distance = 0.0;
};
RawScore score(std::span<const ScoredCell> cells, const NbvConfig& config);

struct CandidateView {
  Pose pose;
  Path tree_path;  // root -> candidate, along the RRT
  double j_entropy = 0.0;
  double j_distance = 0.0;
  double j = 0.0;
  int index = 0;  // insertion index, used for deterministic tie-breaking
};

/// Normalizes each term by its maximum over the candidate set, combines
/// them with alpha, and sorts by descending J (ties: shorter tree path,
/// then insertion index).
std::vector<CandidateView> rank_candidates(std::vector<CandidateView> views,
                                           const NbvConfig& config);

struct RelinkResult {
  bool ok = false;
  CandidateView nbv;
  Path common;                  // root -> NBV pose
  std::vector<Path> hypotheses; // rewritten, same order as the input
  int attempts = 0;
};

/// Tries to reconnect the top-ranked candidates to both hypotheses by
/// growing a fresh RRT from each candidate; gives up after
/// config.relink_attempts candidates.
RelinkResult relink(const MapView& view, const OccupancyGrid& grid,
                    std::span<const CandidateView> ordered,
                    const std::vector<Path>& hypotheses,
                    const NbvConfig& config,
                    std::span<const MotionPrimitive> primitives,
                    const Footprint& footprint, const CollisionPolicy& policy,
                    std::mt19937_64& rng);

/// Debug dump of a ranked candidate list: `index x y theta J_H J_d J`.
void dump_candidates(std::ostream& os, std::span<const CandidateView> views);

}  // namespace gridnav
