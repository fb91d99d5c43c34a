// Microbenchmarks for the hot paths: ray traversal, scan integration,
// grid search, and candidate scoring.
#include <benchmark/benchmark.h>

#include <random>

#include "gridnav/depth_sensor.hpp"
#include "gridnav/nbv.hpp"
#include "gridnav/search.hpp"
#include "gridnav/world_model.hpp"

using namespace gridnav;

namespace {

OccupancyGrid mapped_grid(const WorldModel& world) {
  GridSpec spec;
  spec.origin = {world.bounds.x0, world.bounds.y0};
  spec.width = static_cast<int>((world.bounds.x1 - world.bounds.x0) / 0.25);
  spec.height = static_cast<int>((world.bounds.y1 - world.bounds.y0) / 0.25);
  OccupancyGrid grid(spec);
  const SensorSpec sensor;
  for (const Pose& start : world.starts) {
    const DepthScan scan = render_truth(world, start, sensor);
    grid.integrate_scan(start, scan);
  }
  return grid;
}

void bm_raycast(benchmark::State& state) {
  const WorldModel world = build_environment("open");
  const OccupancyGrid grid = mapped_grid(world);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(-7.0, 7.0);
  std::uniform_real_distribution<double> uy(-7.0, 3.0);
  for (auto _ : state) {
    const Vec2 a{ux(rng), uy(rng)};
    const Vec2 b{ux(rng), uy(rng)};
    benchmark::DoNotOptimize(grid.raycast(a, b));
  }
}
BENCHMARK(bm_raycast);

void bm_integrate_scan(benchmark::State& state) {
  const WorldModel world = build_environment("open");
  OccupancyGrid grid = mapped_grid(world);
  const SensorSpec sensor;
  const Pose pose = world.starts.front();
  const DepthScan scan = render_truth(world, pose, sensor);
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid.integrate_scan(pose, scan));
  }
}
BENCHMARK(bm_integrate_scan);

void bm_astar(benchmark::State& state) {
  const WorldModel world = build_environment("open");
  const OccupancyGrid grid = mapped_grid(world);
  const MapView view = MapView::probabilistic(grid);
  const Footprint fp = Footprint::block3x3();
  const CollisionPolicy policy;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        astar(view, world.starts.front(), world.goal, fp, policy));
  }
}
BENCHMARK(bm_astar);

void bm_score_candidates(benchmark::State& state) {
  const WorldModel world = build_environment("open");
  const OccupancyGrid grid = mapped_grid(world);
  const Footprint fp = Footprint::block3x3();
  const CollisionPolicy policy;
  const HypothesisConfig hyp_cfg{policy, 4};
  const HypothesisSet hs = plan_hypotheses(grid, world.starts.front(),
                                           world.goal, fp, hyp_cfg);
  const SensorSpec sensor;
  const NbvConfig cfg;
  const Pose candidate{0.0, -4.0, 1.2};
  for (auto _ : state) {
    const auto cells = collect_cells(grid, hs.paths, candidate,
                                     world.starts.front(), fp, sensor);
    benchmark::DoNotOptimize(score(cells, cfg));
  }
}
BENCHMARK(bm_score_candidates);

}  // namespace

BENCHMARK_MAIN();
