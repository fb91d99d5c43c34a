#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gridnav/geometry.hpp"
#include "gridnav/types.hpp"

namespace gridnav {

/// Ground-truth world: rectangular bounds plus axis-aligned box obstacles.
struct WorldModel {
  std::string name = "custom";
  Box bounds;
  std::vector<Box> obstacles;
  std::vector<Pose> starts;
  GoalRegion goal;

  bool inside_obstacle(const Vec2& p) const;
  /// Distance from p to the closest obstacle (infinity when none).
  double obstacle_clearance(const Vec2& p) const;

  /// First intersection distance of the ray from `origin` along `angle`
  /// with any obstacle, up to max_range; infinity when there is no hit.
  double ray_distance(const Vec2& origin, double angle, double max_range) const;
};

/// Built-in environments: "open" (obstacle field with a dead-end on the
/// right when facing the goal) and "room" (symmetric structure with top and
/// bottom entrances). Throws on unknown names.
WorldModel build_environment(const std::string& name);

/// Structured text format with `bounds`, `obstacle box`, `start` and `goal`
/// entries; see README for the schema.
void save_environment(std::ostream& os, const WorldModel& world);
WorldModel load_environment(std::istream& is);

}  // namespace gridnav
