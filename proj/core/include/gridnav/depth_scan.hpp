#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace gridnav {

/// Horizontal depth camera model: beam count and FOV follow a 672x376
/// stereo camera with a 107 degree field of view.
struct SensorSpec {
  double fov_deg = 107.0;
  int beams = 672;
  double max_range = 7.0;
  double perfect_range = 3.0;  // s: no noise below this distance
  int window = 10;             // w: half-width of the edge noise window, in beams
  double edge_threshold = 0.5; // depth jump (m) that counts as a discontinuity

  double fov_rad() const { return fov_deg * M_PI / 180.0; }

  /// Beam azimuth relative to the sensor heading, increasing with index.
  double azimuth(int beam) const {
    return -fov_rad() / 2.0 + fov_rad() * beam / (beams - 1);
  }
};

/// Edge-concentrated range noise parameters (rho, a, b).
struct NoiseParams {
  double rho = 0.0;
  double a = 0.0;
  double b = 0.0;

  static NoiseParams off() { return {0.0, 0.0, 0.0}; }
  static NoiseParams low() { return {0.01, 0.05, 0.002}; }
  static NoiseParams high() { return {0.05, 0.125, 0.005}; }
};

/// One horizontal scan. Infinity marks a max-range return (no obstacle
/// within max_range); such beams only clear space when integrated.
struct DepthScan {
  std::vector<double> ranges;
  double max_range = 7.0;
  double fov = 107.0 * M_PI / 180.0;  // radians

  /// Beam azimuth relative to the sensor heading.
  double azimuth(int beam) const {
    const int n = static_cast<int>(ranges.size());
    return -fov / 2.0 + fov * beam / (n - 1);
  }

  static bool is_max_range(double r) { return std::isinf(r); }
  static constexpr double kMaxRange = std::numeric_limits<double>::infinity();
};

}  // namespace gridnav
