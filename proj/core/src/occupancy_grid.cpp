#include "gridnav/occupancy_grid.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace gridnav {

namespace {
constexpr double kUnobserved = std::numeric_limits<double>::quiet_NaN();
constexpr double kTieEps = 1e-12;
}  // namespace

double logit(double p) { return std::log(p / (1.0 - p)); }
double sigmoid(double l) { return 1.0 - 1.0 / (1.0 + std::exp(l)); }

OccupancyGrid::OccupancyGrid(const GridSpec& spec, const ClassifierConfig& cfg)
    : spec_(spec), cfg_(cfg) {
  if (spec.width <= 0 || spec.height <= 0 || spec.resolution <= 0.0)
    throw std::invalid_argument("OccupancyGrid: invalid grid spec");
  logodds_.assign(static_cast<std::size_t>(spec.cell_count()), kUnobserved);
}

void OccupancyGrid::check_bounds(const CellIndex& c) const {
  if (!spec_.in_bounds(c))
    throw std::out_of_range("OccupancyGrid: cell index out of bounds");
}

bool OccupancyGrid::known(const CellIndex& c) const {
  check_bounds(c);
  return !std::isnan(logodds_[spec_.flat(c)]);
}

double OccupancyGrid::log_odds(const CellIndex& c) const {
  check_bounds(c);
  return logodds_[spec_.flat(c)];
}

double OccupancyGrid::probability(const CellIndex& c) const {
  check_bounds(c);
  const double l = logodds_[spec_.flat(c)];
  return std::isnan(l) ? 0.5 : sigmoid(l);
}

CellClass OccupancyGrid::classify(const CellIndex& c) const {
  check_bounds(c);
  const double l = logodds_[spec_.flat(c)];
  if (std::isnan(l)) return CellClass::Unknown;
  const double p = sigmoid(l);
  if (p >= cfg_.p_h) return CellClass::Obstacle;
  if (p <= cfg_.p_l) return CellClass::Free;
  return CellClass::Uncertain;
}

void OccupancyGrid::apply_update(const CellIndex& c, double delta,
                                 double clamp_hi) {
  double& l = logodds_[spec_.flat(c)];
  const double base = std::isnan(l) ? 0.0 : l;
  l = std::clamp(base + delta, logit(cfg_.clamp_min), logit(clamp_hi));
}

namespace {

/// Truncates the segment from->from+dir*len so the endpoint stays strictly
/// inside the grid rectangle. Returns the truncated length.
double clip_length(const GridSpec& spec, const Vec2& from, const Vec2& dir,
                   double len) {
  const double eps = spec.resolution * 1e-6;
  const double xmin = spec.origin.x + eps;
  const double xmax = spec.origin.x + spec.width * spec.resolution - eps;
  const double ymin = spec.origin.y + eps;
  const double ymax = spec.origin.y + spec.height * spec.resolution - eps;
  double t = len;
  if (dir.x > 0) t = std::min(t, (xmax - from.x) / dir.x);
  if (dir.x < 0) t = std::min(t, (xmin - from.x) / dir.x);
  if (dir.y > 0) t = std::min(t, (ymax - from.y) / dir.y);
  if (dir.y < 0) t = std::min(t, (ymin - from.y) / dir.y);
  return std::max(0.0, t);
}

}  // namespace

ScanStats OccupancyGrid::integrate_scan(const Pose& sensor_pose,
                                        const DepthScan& scan) {
  if (!sensor_pose.theta)
    throw std::invalid_argument("integrate_scan: sensor pose needs a heading");
  const Vec2 origin = sensor_pose.position();
  if (!spec_.in_bounds(origin))
    throw std::out_of_range("integrate_scan: sensor pose out of bounds");

  ScanStats stats;
  const double miss = logit(cfg_.p_miss);
  const double hit = logit(cfg_.p_hit);
  const int n = static_cast<int>(scan.ranges.size());

  // Cells hit by any beam of this scan never receive miss updates from the
  // same scan, so thin surfaces seen at grazing incidence are not erased by
  // adjacent beams traversing the free part of the surface cell. Miss
  // updates otherwise apply per beam.
  // 0 not hit, 2 hit/far, 3 hit/near
  std::vector<unsigned char> hit_kind(logodds_.size(), 0);

  struct Beam {
    Vec2 end;
    bool has_hit;  // endpoint is a surface return, not a truncation
  };
  std::vector<Beam> beams;
  beams.reserve(scan.ranges.size());

  for (int i = 0; i < n; ++i) {
    const double r = scan.ranges[i];
    if (std::isnan(r)) {
      ++stats.beams_skipped;
      continue;
    }
    ++stats.beams_used;
    const double ang = *sensor_pose.theta + scan.azimuth(i);
    const Vec2 dir{std::cos(ang), std::sin(ang)};

    const bool max_ray = DepthScan::is_max_range(r) || r > scan.max_range;
    const double want = max_ray ? scan.max_range : r;
    const double len = clip_length(spec_, origin, dir, want);
    const Vec2 end = origin + dir * len;
    const bool endpoint_clipped = len < want - 1e-9;
    const bool has_hit = !max_ray && !endpoint_clipped;
    beams.push_back({end, has_hit});
    if (has_hit) {
      const unsigned char kind = (r <= cfg_.near_range) ? 3 : 2;
      unsigned char& m = hit_kind[spec_.flat(spec_.cell_at(end))];
      m = std::max(m, kind);
    }
  }

  for (const Beam& b : beams) {
    for (const CellIndex& c : raycast(origin, b.end))
      if (!hit_kind[spec_.flat(c)]) apply_update(c, miss, cfg_.clamp_max_near);
    // A truncated beam (max-range or grid-clipped) has no surface return;
    // its endpoint cell is partially traversed and counts as a miss too.
    // Otherwise the outermost sensed layer would collect only occasional
    // sliver crossings and linger just above the Free threshold.
    if (!b.has_hit) {
      const CellIndex c = spec_.cell_at(b.end);
      if (!hit_kind[spec_.flat(c)]) apply_update(c, miss, cfg_.clamp_max_near);
    }
  }

  for (int i = 0; i < spec_.cell_count(); ++i) {
    if (!hit_kind[i]) continue;
    const CellIndex c{i % spec_.width, i / spec_.width};
    apply_update(c, hit,
                 hit_kind[i] == 3 ? cfg_.clamp_max_near : cfg_.clamp_max_far);
  }
  return stats;
}

std::vector<CellIndex> OccupancyGrid::raycast(const Vec2& from,
                                              const Vec2& to) const {
  CellIndex cur = spec_.cell_at(from);
  const CellIndex dest = spec_.cell_at(to);
  check_bounds(cur);
  check_bounds(dest);

  std::vector<CellIndex> out;
  if (cur == dest) return out;

  const Vec2 d = to - from;
  const int step_x = d.x > 0 ? 1 : (d.x < 0 ? -1 : 0);
  const int step_y = d.y > 0 ? 1 : (d.y < 0 ? -1 : 0);

  const double inf = std::numeric_limits<double>::infinity();
  // Parametric distance (fraction of the segment) to the next cell border.
  auto border_x = [&](int cx) {
    return spec_.origin.x + (cx + (step_x > 0 ? 1 : 0)) * spec_.resolution;
  };
  auto border_y = [&](int cy) {
    return spec_.origin.y + (cy + (step_y > 0 ? 1 : 0)) * spec_.resolution;
  };
  double t_max_x = step_x ? (border_x(cur.cx) - from.x) / d.x : inf;
  double t_max_y = step_y ? (border_y(cur.cy) - from.y) / d.y : inf;
  const double t_delta_x = step_x ? spec_.resolution / std::abs(d.x) : inf;
  const double t_delta_y = step_y ? spec_.resolution / std::abs(d.y) : inf;

  const std::size_t cap =
      static_cast<std::size_t>(spec_.width + spec_.height + 4);
  out.push_back(cur);
  while (out.size() <= cap) {
    if (std::abs(t_max_x - t_max_y) < kTieEps) {
      // Exact corner crossing: step diagonally, the segment does not enter
      // the two side cells.
      cur.cx += step_x;
      cur.cy += step_y;
      t_max_x += t_delta_x;
      t_max_y += t_delta_y;
    } else if (t_max_x < t_max_y) {
      cur.cx += step_x;
      t_max_x += t_delta_x;
    } else {
      cur.cy += step_y;
      t_max_y += t_delta_y;
    }
    if (cur == dest) break;
    if (!spec_.in_bounds(cur)) break;
    out.push_back(cur);
  }
  return out;
}

double OccupancyGrid::entropy(const CellIndex& c) const {
  const double p = probability(c);
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

double OccupancyGrid::visibility(const Vec2& viewpoint,
                                 const CellIndex& cell) const {
  check_bounds(cell);
  const std::vector<CellIndex> ray = raycast(viewpoint, spec_.center(cell));
  double v = 1.0;
  for (std::size_t i = 1; i < ray.size(); ++i)  // skip the viewpoint's cell
    v *= 1.0 - probability(ray[i]);
  return v;
}

void OccupancyGrid::mask_hypothesis_region(const Path& path, int d_hyp,
                                           const Pose& start, const Pose& goal,
                                           const Footprint& footprint) {
  if (path.empty())
    throw std::invalid_argument("mask_hypothesis_region: empty path");

  // Seeds are collected against the pre-mask classification.
  std::vector<CellIndex> seeds;
  std::vector<char> seen(static_cast<std::size_t>(spec_.cell_count()), 0);
  for (const Pose& p : path.poses) {
    const CellIndex base = spec_.cell_at(p.position());
    for (const CellIndex& o : footprint.offsets) {
      const CellIndex c{base.cx + o.cx, base.cy + o.cy};
      if (!spec_.in_bounds(c) || seen[spec_.flat(c)]) continue;
      seen[spec_.flat(c)] = 1;
      const CellClass k = classify(c);
      if (k == CellClass::Unknown || k == CellClass::Uncertain)
        seeds.push_back(c);
    }
  }

  const CellIndex start_cell = spec_.cell_at(start.position());
  const CellIndex goal_cell = spec_.cell_at(goal.position());
  const int excl = footprint.radius_cells() + 1;
  const double obstacle_logodds = logit(cfg_.clamp_max_near);

  for (const CellIndex& s : seeds) {
    for (int dy = -d_hyp; dy <= d_hyp; ++dy) {
      const int rem = d_hyp - std::abs(dy);
      for (int dx = -rem; dx <= rem; ++dx) {
        const CellIndex c{s.cx + dx, s.cy + dy};
        if (!spec_.in_bounds(c)) continue;
        if (chebyshev(c, start_cell) <= excl || chebyshev(c, goal_cell) <= excl)
          continue;
        double& l = logodds_[spec_.flat(c)];
        l = std::isnan(l) ? obstacle_logodds : std::max(l, obstacle_logodds);
      }
    }
  }
}

void OccupancyGrid::set_probability(const CellIndex& c, double p) {
  check_bounds(c);
  logodds_[spec_.flat(c)] = logit(p);
}

void OccupancyGrid::set_unknown(const CellIndex& c) {
  check_bounds(c);
  logodds_[spec_.flat(c)] = kUnobserved;
}

void OccupancyGrid::serialize(std::ostream& os) const {
  os << spec_.width << ' ' << spec_.height << ' ' << spec_.resolution << ' '
     << spec_.origin.x << ' ' << spec_.origin.y << '\n';
  os << std::fixed << std::setprecision(6);
  for (int cy = 0; cy < spec_.height; ++cy) {
    for (int cx = 0; cx < spec_.width; ++cx) {
      if (cx) os << ' ';
      const double l = logodds_[spec_.flat({cx, cy})];
      if (std::isnan(l))
        os << "-1";
      else
        os << sigmoid(l);
    }
    os << '\n';
  }
  os.unsetf(std::ios::fixed);
}

OccupancyGrid OccupancyGrid::deserialize(std::istream& is,
                                         const ClassifierConfig& cfg) {
  GridSpec spec;
  if (!(is >> spec.width >> spec.height >> spec.resolution >> spec.origin.x >>
        spec.origin.y))
    throw std::runtime_error("OccupancyGrid: malformed header");
  OccupancyGrid grid(spec, cfg);
  for (int cy = 0; cy < spec.height; ++cy) {
    for (int cx = 0; cx < spec.width; ++cx) {
      double p;
      if (!(is >> p)) throw std::runtime_error("OccupancyGrid: short file");
      if (p >= 0.0) grid.set_probability({cx, cy}, p);
    }
  }
  return grid;
}

}  // namespace gridnav
