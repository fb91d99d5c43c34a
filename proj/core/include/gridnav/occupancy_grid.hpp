#pragma once

#include <iosfwd>
#include <vector>

#include "gridnav/depth_scan.hpp"
#include "gridnav/geometry.hpp"
#include "gridnav/types.hpp"

namespace gridnav {

struct GridSpec {
  int width = 0;   // cells
  int height = 0;  // cells
  double resolution = 0.25;  // meters per cell
  Vec2 origin;     // world coordinates of the lower-left corner of cell (0,0)

  bool in_bounds(const CellIndex& c) const {
    return c.cx >= 0 && c.cx < width && c.cy >= 0 && c.cy < height;
  }
  bool in_bounds(const Vec2& w) const { return in_bounds(cell_at(w)); }

  CellIndex cell_at(const Vec2& w) const {
    return {static_cast<int>(std::floor((w.x - origin.x) / resolution)),
            static_cast<int>(std::floor((w.y - origin.y) / resolution))};
  }
  Vec2 center(const CellIndex& c) const {
    return {origin.x + (c.cx + 0.5) * resolution,
            origin.y + (c.cy + 0.5) * resolution};
  }
  int flat(const CellIndex& c) const { return c.cy * width + c.cx; }
  int cell_count() const { return width * height; }
};

/// Classification thresholds and inverse sensor model parameters.
struct ClassifierConfig {
  double p_l = 0.18;
  double p_h = 0.75;
  double p_hit = 0.7;
  double p_miss = 0.2;
  double clamp_min = 0.12;
  double clamp_max_near = 0.85;
  double clamp_max_far = 0.7;
  double near_range = 3.5;  // meters; reliable-measurement distance
  double max_range = 7.0;   // meters; mapping range
};

enum class CellClass { Unknown, Obstacle, Free, Uncertain };

double logit(double p);
double sigmoid(double logodds);

struct ScanStats {
  int beams_used = 0;
  int beams_skipped = 0;  // NaN ranges
};

/// Probabilistic occupancy grid storing per-cell log-odds. Cells that never
/// received a measurement are Unknown. A copy of the grid is an immutable
/// snapshot for the planners; all query operations are const.
class OccupancyGrid {
 public:
  OccupancyGrid(const GridSpec& spec, const ClassifierConfig& cfg = {});

  const GridSpec& spec() const { return spec_; }
  const ClassifierConfig& config() const { return cfg_; }

  bool known(const CellIndex& c) const;
  /// Occupancy probability; 0.5 for Unknown cells.
  double probability(const CellIndex& c) const;
  double log_odds(const CellIndex& c) const;

  CellClass classify(const CellIndex& c) const;  // throws on out-of-bounds

  /// Beam-based inverse sensor model. Cells before a beam endpoint receive
  /// miss updates, the endpoint a hit update clamped by its distance from
  /// the sensor (near_range switches the upper clamp). Max-range beams only
  /// clear. Beams are truncated at scan.max_range, which lets the harness
  /// emulate a shorter mapping range. Within one scan, hits take precedence:
  /// a cell hit by any beam receives one hit update (the stronger clamp if
  /// both apply) and no miss updates, so thin surfaces seen at grazing
  /// incidence are not erased by neighboring beams.
  ScanStats integrate_scan(const Pose& sensor_pose, const DepthScan& scan);

  /// Cells intersected by the segment from `from` to `to`, in traversal
  /// order, including the origin cell and excluding the destination cell.
  /// Corner crossings step diagonally (only cells whose interior the
  /// segment touches are reported).
  std::vector<CellIndex> raycast(const Vec2& from, const Vec2& to) const;

  /// Shannon entropy of the cell occupancy in nats; Unknown cells use p=0.5.
  double entropy(const CellIndex& c) const;

  /// Probability that `cell` is visible from `viewpoint`: product of
  /// (1 - p) over the cells traversed between them, both endpoints excluded.
  double visibility(const Vec2& viewpoint, const CellIndex& cell) const;

  /// Marks every cell within Manhattan distance d_hyp of an Unknown or
  /// Uncertain cell lying in some footprint neighborhood of `path` as an
  /// Obstacle, except near the start and goal poses (exclusion radius =
  /// footprint radius + 1 cell). Intended to run on a snapshot copy.
  void mask_hypothesis_region(const Path& path, int d_hyp, const Pose& start,
                              const Pose& goal, const Footprint& footprint);

  /// Forces a cell to a probability (testing and map authoring).
  void set_probability(const CellIndex& c, double p);
  void set_unknown(const CellIndex& c);

  /// Portable text format: `width height resolution origin_x origin_y`
  /// header, then row-major probabilities with -1 for Unknown.
  void serialize(std::ostream& os) const;
  static OccupancyGrid deserialize(std::istream& is,
                                   const ClassifierConfig& cfg = {});

 private:
  void check_bounds(const CellIndex& c) const;
  void apply_update(const CellIndex& c, double delta, double clamp_hi);

  GridSpec spec_;
  ClassifierConfig cfg_;
  std::vector<double> logodds_;  // NaN = never measured
};

}  // namespace gridnav
