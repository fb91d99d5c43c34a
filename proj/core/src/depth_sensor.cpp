#include "gridnav/depth_sensor.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace gridnav {

DepthScan render_truth(const WorldModel& world, const Pose& pose,
                       const SensorSpec& spec) {
  if (!pose.theta)
    throw std::invalid_argument("render_truth: pose needs a heading");
  if (world.inside_obstacle(pose.position()))
    throw std::domain_error("render_truth: pose inside an obstacle");

  DepthScan scan;
  scan.max_range = spec.max_range;
  scan.fov = spec.fov_rad();
  scan.ranges.resize(spec.beams);
  for (int i = 0; i < spec.beams; ++i) {
    const double ang = *pose.theta + spec.azimuth(i);
    const double d = world.ray_distance(pose.position(), ang,
                                        std::numeric_limits<double>::infinity());
    scan.ranges[i] = std::isfinite(d) ? d : DepthScan::kMaxRange;
  }
  return scan;
}

std::vector<int> detect_edges(const DepthScan& scan, double threshold) {
  std::vector<int> edges;
  const int n = static_cast<int>(scan.ranges.size());
  for (int i = 1; i < n; ++i) {
    const double a = scan.ranges[i - 1];
    const double b = scan.ranges[i];
    if (std::isnan(a) || std::isnan(b)) continue;
    if (DepthScan::is_max_range(a) || DepthScan::is_max_range(b)) continue;
    if (std::abs(b - a) > threshold) {
      const int idx = (a <= b) ? i - 1 : i;  // relocate onto the nearer side
      if (edges.empty() || edges.back() != idx) edges.push_back(idx);
    }
  }
  return edges;
}

double noise_candidate(double range, int window_dist, const SensorSpec& spec,
                       const NoiseParams& params) {
  const double dsi = std::max(0.0, range - spec.perfect_range);
  return params.rho * range * (spec.window - window_dist) * dsi * dsi;
}

DepthScan corrupt(const DepthScan& scan, const std::vector<int>& edges,
                  const SensorSpec& spec, const NoiseParams& params,
                  std::mt19937_64& rng) {
  DepthScan out = scan;
  const int n = static_cast<int>(scan.ranges.size());
  for (const int e : edges) {
    const double edge_range = scan.ranges[e];
    if (!std::isfinite(edge_range) || edge_range <= spec.perfect_range)
      continue;
    const int lo = std::max(0, e - spec.window);
    const int hi = std::min(n - 1, e + spec.window);
    for (int p = lo; p <= hi; ++p) {
      const double r = scan.ranges[p];
      if (!std::isfinite(r)) continue;
      const double dsi = std::max(0.0, r - spec.perfect_range);
      if (dsi <= 0.0) continue;  // perfect sensing zone is untouched
      double sigma = params.a * dsi;
      const double sd = std::sqrt(params.b) * dsi;
      if (sd > 0.0) sigma = std::normal_distribution<double>(sigma, sd)(rng);
      const double cand =
          noise_candidate(r, std::abs(p - e), spec, params) + sigma;
      // The candidate saturates at the sensor's mapping range before the
      // max, so corruption can only push a reading outward; a return from
      // beyond the mapping range is never pulled back onto it.
      out.ranges[p] = std::max(out.ranges[p], std::min(cand, spec.max_range));
    }
  }
  return out;
}

DepthScan sense(const WorldModel& world, const Pose& pose,
                const SensorSpec& spec, const NoiseParams& params,
                std::mt19937_64& rng) {
  const DepthScan truth = render_truth(world, pose, spec);
  const std::vector<int> edges = detect_edges(truth, spec.edge_threshold);
  return corrupt(truth, edges, spec, params, rng);
}

void dump_scan(std::ostream& os, const SensorSpec& spec, const DepthScan& truth,
               const DepthScan& noisy) {
  os << std::fixed << std::setprecision(4);
  for (int i = 0; i < static_cast<int>(truth.ranges.size()); ++i) {
    os << i << ' ' << spec.azimuth(i) * 180.0 / M_PI << ' ' << truth.ranges[i]
       << ' ' << noisy.ranges[i] << '\n';
  }
  os.unsetf(std::ios::fixed);
}

}  // namespace gridnav
