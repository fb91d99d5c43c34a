#include "gridnav/nbv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace gridnav {

std::vector<MotionPrimitive> default_primitives() {
  std::vector<MotionPrimitive> prims;
  for (const double k : {0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0})
    prims.push_back({k, 0.5});
  return prims;
}

Pose apply_primitive(const Pose& from, const MotionPrimitive& prim,
                     double fraction) {
  if (!from.theta)
    throw std::invalid_argument("apply_primitive: pose needs a heading");
  const double s = prim.length * fraction;
  const double th = *from.theta;
  Pose out;
  if (std::abs(prim.curvature) < 1e-12) {
    out.x = from.x + s * std::cos(th);
    out.y = from.y + s * std::sin(th);
    out.theta = th;
  } else {
    const double r = 1.0 / prim.curvature;
    const double dth = prim.curvature * s;
    out.x = from.x + r * (std::sin(th + dth) - std::sin(th));
    out.y = from.y - r * (std::cos(th + dth) - std::cos(th));
    out.theta = wrap_angle(th + dth);
  }
  return out;
}

Path Rrt::path_to(int index) const {
  std::vector<int> chain;
  for (int i = index; i >= 0; i = nodes[i].parent) chain.push_back(i);
  std::reverse(chain.begin(), chain.end());

  Path path;
  path.poses.push_back(nodes[chain.front()].pose);
  for (std::size_t i = 1; i < chain.size(); ++i) {
    const RrtNode& n = nodes[chain[i]];
    for (const Pose& p : n.arc) path.poses.push_back(p);
    path.poses.push_back(n.pose);
  }
  return path;
}

namespace {

/// Arc samples between from and the primitive endpoint (endpoint excluded),
/// plus a collision verdict for the whole arc.
bool arc_feasible(const MapView& view, const Pose& from,
                  const MotionPrimitive& prim, const NbvConfig& config,
                  const Footprint& footprint, const CollisionPolicy& policy,
                  std::vector<Pose>* samples) {
  const int steps = std::max(1, static_cast<int>(
                                    std::ceil(prim.length / config.arc_step)));
  samples->clear();
  for (int i = 1; i <= steps; ++i) {
    const Pose p = apply_primitive(from, prim, static_cast<double>(i) / steps);
    if (pose_collides(view, p, footprint, policy)) return false;
    if (i < steps) samples->push_back(p);
  }
  return true;
}

}  // namespace

Rrt grow_rrt(const MapView& view, const Pose& root, const NbvConfig& config,
             std::span<const MotionPrimitive> primitives,
             const Footprint& footprint, const CollisionPolicy& policy,
             std::mt19937_64& rng) {
  if (!root.theta) throw std::invalid_argument("grow_rrt: root needs heading");
  if (pose_collides(view, root, footprint, policy))
    throw std::invalid_argument("grow_rrt: root pose collides");

  Rrt tree;
  tree.nodes.push_back({root, -1, {}});

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int budget = config.expansion_factor * config.candidates;
  std::vector<Pose> samples;

  for (int iter = 0;
       iter < budget &&
       static_cast<int>(tree.nodes.size()) - 1 < config.candidates;
       ++iter) {
    // Uniform sample in the disc around the root.
    const double r = config.rrt_radius * std::sqrt(unit(rng));
    const double a = 2.0 * M_PI * unit(rng);
    const Vec2 target{root.x + r * std::cos(a), root.y + r * std::sin(a)};

    int nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(tree.nodes.size()); ++i) {
      const double d = distance(tree.nodes[i].pose.position(), target);
      if (d < best) {
        best = d;
        nearest = i;
      }
    }

    int best_prim = -1;
    double best_d = std::numeric_limits<double>::infinity();
    Pose best_end;
    std::vector<Pose> best_arc;
    for (int pi = 0; pi < static_cast<int>(primitives.size()); ++pi) {
      const Pose end = apply_primitive(tree.nodes[nearest].pose,
                                       primitives[pi]);
      if (distance(end.position(), root.position()) > config.rrt_radius)
        continue;
      const double d = distance(end.position(), target);
      if (d >= best_d) continue;
      if (!arc_feasible(view, tree.nodes[nearest].pose, primitives[pi], config,
                        footprint, policy, &samples))
        continue;
      best_d = d;
      best_prim = pi;
      best_end = end;
      best_arc = samples;
    }
    if (best_prim >= 0)
      tree.nodes.push_back({best_end, nearest, std::move(best_arc)});
  }
  return tree;
}

std::vector<ScoredCell> collect_cells(const OccupancyGrid& grid,
                                      const std::vector<Path>& hypotheses,
                                      const Pose& candidate, const Pose& robot,
                                      const Footprint& footprint,
                                      const SensorSpec& sensor) {
  if (!candidate.theta)
    throw std::invalid_argument("collect_cells: candidate needs a heading");
  const GridSpec& spec = grid.spec();

  // Rank hypotheses by path length; cells keep the best rank they get.
  std::vector<int> order(hypotheses.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return hypotheses[a].length() < hypotheses[b].length();
  });

  std::vector<int> rank(spec.cell_count(), 0);  // 0 = not a member
  for (std::size_t r = 0; r < order.size(); ++r) {
    for (const Pose& p : hypotheses[order[r]].poses) {
      const CellIndex base = spec.cell_at(p.position());
      for (const CellIndex& o : footprint.offsets) {
        const CellIndex c{base.cx + o.cx, base.cy + o.cy};
        if (!spec.in_bounds(c)) continue;
        int& slot = rank[spec.flat(c)];
        if (slot == 0) slot = static_cast<int>(r) + 1;
      }
    }
  }

  const double half_fov = sensor.fov_rad() / 2.0;
  std::vector<ScoredCell> cells;
  for (int cy = 0; cy < spec.height; ++cy) {
    for (int cx = 0; cx < spec.width; ++cx) {
      const CellIndex c{cx, cy};
      const int k = rank[spec.flat(c)];
      if (k == 0) continue;
      const CellClass cls = grid.classify(c);
      if (cls != CellClass::Unknown && cls != CellClass::Uncertain) continue;

      const Vec2 center = spec.center(c);
      const Vec2 rel = center - candidate.position();
      const double range = rel.norm();
      if (range > sensor.max_range) continue;
      if (range > 1e-9 &&
          std::abs(angle_diff(std::atan2(rel.y, rel.x), *candidate.theta)) >
              half_fov)
        continue;

      ScoredCell sc;
      sc.cell = c;
      sc.rank = k;
      sc.entropy = grid.entropy(c);
      sc.visibility = grid.visibility(candidate.position(), c);
      sc.dist_robot = distance(robot.position(), center);
      sc.dist_candidate = range;
      cells.push_back(sc);
    }
  }
  return cells;
}

RawScore score(std::span<const ScoredCell> cells, const NbvConfig& config) {
  RawScore s;
  for (const ScoredCell& c : cells) {
    const double weight = std::pow(static_cast<double>(c.rank), config.beta);
    s.j_entropy += c.visibility * c.entropy / weight;
    if (c.visibility > config.gamma)
      s.j_distance += std::max(0.0, c.dist_robot - c.dist_candidate) / weight;
  }
  return s;
}

std::vector<CandidateView> rank_candidates(std::vector<CandidateView> views,
                                           const NbvConfig& config) {
  double eta_h = 0.0;
  double eta_d = 0.0;
  for (const CandidateView& v : views) {
    eta_h = std::max(eta_h, v.j_entropy);
    eta_d = std::max(eta_d, v.j_distance);
  }
  for (CandidateView& v : views) {
    const double h = eta_h > 0.0 ? v.j_entropy / eta_h : 0.0;
    const double d = eta_d > 0.0 ? v.j_distance / eta_d : 0.0;
    v.j = config.alpha * h + (1.0 - config.alpha) * d;
  }
  std::stable_sort(views.begin(), views.end(),
                   [](const CandidateView& a, const CandidateView& b) {
                     if (a.j != b.j) return a.j > b.j;
                     const double la = a.tree_path.length();
                     const double lb = b.tree_path.length();
                     if (la != lb) return la < lb;
                     return a.index < b.index;
                   });
  return views;
}

namespace {

/// Index of the closest hypothesis pose within tol of any tree node, along
/// with that node; -1 when unreachable.
struct Junction {
  int node = -1;
  int pose_index = -1;
  double dist = std::numeric_limits<double>::infinity();
};

Junction find_junction(const Rrt& tree, const Path& hypothesis, double tol) {
  Junction best;
  for (int ni = 0; ni < static_cast<int>(tree.nodes.size()); ++ni) {
    const Vec2 np = tree.nodes[ni].pose.position();
    for (int pi = 0; pi < static_cast<int>(hypothesis.poses.size()); ++pi) {
      const double d = distance(np, hypothesis.poses[pi].position());
      if (d <= tol && d < best.dist) {
        best = {ni, pi, d};
      }
    }
  }
  return best;
}

}  // namespace

RelinkResult relink(const MapView& view, const OccupancyGrid& grid,
                    std::span<const CandidateView> ordered,
                    const std::vector<Path>& hypotheses,
                    const NbvConfig& config,
                    std::span<const MotionPrimitive> primitives,
                    const Footprint& footprint, const CollisionPolicy& policy,
                    std::mt19937_64& rng) {
  RelinkResult result;
  if (hypotheses.size() < 2)
    throw std::invalid_argument("relink: needs two hypotheses");

  const double tol = grid.spec().resolution;  // one cell
  NbvConfig relink_cfg = config;
  relink_cfg.candidates = config.relink_budget;
  relink_cfg.expansion_factor = 1;

  const int attempts =
      std::min<int>(config.relink_attempts, static_cast<int>(ordered.size()));
  for (int i = 0; i < attempts; ++i) {
    ++result.attempts;
    const CandidateView& cand = ordered[i];
    Rrt tree;
    try {
      tree = grow_rrt(view, cand.pose, relink_cfg, primitives, footprint,
                      policy, rng);
    } catch (const std::invalid_argument&) {
      continue;  // candidate pose no longer valid on this snapshot
    }

    std::vector<Junction> junctions;
    bool all_reached = true;
    for (const Path& h : hypotheses) {
      const Junction j = find_junction(tree, h, tol);
      if (j.node < 0) {
        all_reached = false;
        break;
      }
      junctions.push_back(j);
    }
    if (!all_reached) continue;

    std::vector<Path> rewritten;
    bool valid = true;
    for (std::size_t h = 0; h < hypotheses.size(); ++h) {
      Path path = cand.tree_path;  // robot -> NBV (common segment)
      const Path bridge = tree.path_to(junctions[h].node);
      for (std::size_t p = 1; p < bridge.poses.size(); ++p)
        path.poses.push_back(bridge.poses[p]);
      for (std::size_t p = junctions[h].pose_index;
           p < hypotheses[h].poses.size(); ++p)
        path.poses.push_back(hypotheses[h].poses[p]);
      for (const Pose& pose : path.poses) {
        if (pose_collides(view, pose, footprint, policy)) {
          valid = false;
          break;
        }
      }
      if (!valid) break;
      rewritten.push_back(std::move(path));
    }
    if (!valid) continue;

    result.ok = true;
    result.nbv = cand;
    result.common = cand.tree_path;
    result.hypotheses = std::move(rewritten);
    return result;
  }
  return result;
}

void dump_candidates(std::ostream& os, std::span<const CandidateView> views) {
  for (const CandidateView& v : views) {
    os << v.index << ' ' << v.pose.x << ' ' << v.pose.y << ' '
       << v.pose.theta.value_or(std::nan("")) << ' ' << v.j_entropy << ' '
       << v.j_distance << ' ' << v.j << '\n';
  }
}

}  // namespace gridnav
