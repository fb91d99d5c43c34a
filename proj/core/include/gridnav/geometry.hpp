#pragma once

#include <cmath>
#include <compare>
#include <optional>
#include <vector>

namespace gridnav {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

/// Wraps an angle into [-pi, pi).
inline double wrap_angle(double a) {
  a = std::fmod(a + M_PI, 2.0 * M_PI);
  if (a < 0.0) a += 2.0 * M_PI;
  return a - M_PI;
}

/// Signed smallest difference a - b, wrapped into [-pi, pi).
inline double angle_diff(double a, double b) { return wrap_angle(a - b); }

struct CellIndex {
  int cx = 0;
  int cy = 0;

  bool operator==(const CellIndex&) const = default;
  auto operator<=>(const CellIndex&) const = default;
};

inline int manhattan(const CellIndex& a, const CellIndex& b) {
  return std::abs(a.cx - b.cx) + std::abs(a.cy - b.cy);
}

inline int chebyshev(const CellIndex& a, const CellIndex& b) {
  return std::max(std::abs(a.cx - b.cx), std::abs(a.cy - b.cy));
}

/// A planar pose. Orientation may be left unspecified, e.g. for poses
/// produced by grid search where only the position matters.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  std::optional<double> theta;

  Vec2 position() const { return {x, y}; }
};

/// Axis-aligned box, used for world obstacles. Corners are (x0,y0)-(x1,y1)
/// with x0 <= x1 and y0 <= y1.
struct Box {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  bool contains(const Vec2& p) const {
    return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
  }

  /// Euclidean distance from p to the box (0 inside).
  double distance(const Vec2& p) const {
    const double dx = std::max({x0 - p.x, 0.0, p.x - x1});
    const double dy = std::max({y0 - p.y, 0.0, p.y - y1});
    return std::hypot(dx, dy);
  }
};

}  // namespace gridnav
