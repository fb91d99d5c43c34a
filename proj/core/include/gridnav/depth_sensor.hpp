#pragma once

#include <iosfwd>
#include <random>
#include <vector>

#include "gridnav/depth_scan.hpp"
#include "gridnav/geometry.hpp"
#include "gridnav/world_model.hpp"

namespace gridnav {

/// Exact per-beam distance to the nearest obstacle boundary. Ranges are not
/// capped: far background surfaces keep their true distance so that depth
/// discontinuities against them are detectable. Beams that hit nothing at
/// all return the max-range flag. Throws if the pose is inside an obstacle.
DepthScan render_truth(const WorldModel& world, const Pose& pose,
                       const SensorSpec& spec);

/// 1D discontinuity detector: beam indices where the range jumps by more
/// than `threshold` meters between adjacent beams. The index on the farther
/// side of each jump is relocated to the nearer (obstacle) side; jumps
/// against max-range returns are ignored.
std::vector<int> detect_edges(const DepthScan& scan, double threshold);

/// Deterministic part of the edge noise term for one (edge, beam) pair:
/// rho * i(p_w) * (w - d(p_e,p_w)) * d(s, i(p_w))^2, with
/// d(s, i) = max(0, i - s).
double noise_candidate(double range, int window_dist, const SensorSpec& spec,
                       const NoiseParams& params);

/// Applies edge-concentrated range noise: around each edge beam deeper than
/// the perfect-sensing distance, windowed beams are pushed outward by the
/// candidate value plus Gaussian sigma, accumulated with max across
/// overlapping windows. Corrupted values are clipped to (0, max_range];
/// untouched beams are bit-identical to the input.
DepthScan corrupt(const DepthScan& scan, const std::vector<int>& edges,
                  const SensorSpec& spec, const NoiseParams& params,
                  std::mt19937_64& rng);

/// render -> detect -> corrupt. Deterministic given the generator state.
DepthScan sense(const WorldModel& world, const Pose& pose,
                const SensorSpec& spec, const NoiseParams& params,
                std::mt19937_64& rng);

/// Debug dump: one line per beam `index azimuth_deg truth_m noisy_m`.
void dump_scan(std::ostream& os, const SensorSpec& spec, const DepthScan& truth,
               const DepthScan& noisy);

}  // namespace gridnav
