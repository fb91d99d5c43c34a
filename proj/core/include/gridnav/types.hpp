#pragma once

#include <iosfwd>
#include <vector>

#include "gridnav/geometry.hpp"

namespace gridnav {

/// A path is an ordered pose sequence, first pose at the start and last
/// pose inside the goal region.
struct Path {
  std::vector<Pose> poses;

  bool empty() const { return poses.empty(); }
  std::size_t size() const { return poses.size(); }
  const Pose& front() const { return poses.front(); }
  const Pose& back() const { return poses.back(); }

  /// Summed segment length in meters.
  double length() const {
    double s = 0.0;
    for (std::size_t i = 1; i < poses.size(); ++i)
      s += distance(poses[i - 1].position(), poses[i].position());
    return s;
  }
};

/// Writes one line per pose: `x y theta` (theta printed as `nan` when
/// unspecified). Consumed by the harness and golden tests.
void dump_path(std::ostream& os, const Path& path);

struct GoalRegion {
  Vec2 center;
  double radius = 0.5;

  bool contains(const Vec2& p) const { return distance(center, p) <= radius; }
};

/// Cell offsets fully containing the robot footprint around a pose's cell.
struct Footprint {
  std::vector<CellIndex> offsets;

  /// Default 3x3 block.
  static Footprint block3x3() {
    Footprint fp;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) fp.offsets.push_back({dx, dy});
    return fp;
  }

  /// Every cell whose rectangle comes within radius_m of the pose's cell
  /// center. Used to fully contain a circular robot body at a given grid
  /// resolution.
  static Footprint disc(double radius_m, double resolution) {
    Footprint fp;
    const int reach =
        static_cast<int>(std::ceil(radius_m / resolution + 0.5));
    for (int dy = -reach; dy <= reach; ++dy) {
      for (int dx = -reach; dx <= reach; ++dx) {
        const double ex = std::max(0.0, (std::abs(dx) - 0.5) * resolution);
        const double ey = std::max(0.0, (std::abs(dy) - 0.5) * resolution);
        if (ex * ex + ey * ey < radius_m * radius_m)
          fp.offsets.push_back({dx, dy});
      }
    }
    return fp;
  }

  /// Chebyshev radius of the offset set, in cells.
  int radius_cells() const {
    int r = 0;
    for (const auto& o : offsets) r = std::max(r, chebyshev(o, {0, 0}));
    return r;
  }
};

enum class UnknownIs { Free, Obstacle };

struct CollisionPolicy {
  UnknownIs treat_unknown_as = UnknownIs::Free;
  int uncertain_budget = 2;  // C_N
};

}  // namespace gridnav
