#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gridnav/occupancy_grid.hpp"

using namespace gridnav;

namespace {

GridSpec make_spec(int w, int h, double res = 0.25, Vec2 origin = {0.0, 0.0}) {
  GridSpec s;
  s.width = w;
  s.height = h;
  s.resolution = res;
  s.origin = origin;
  return s;
}

/// Two-beam scan along a fixed world angle relative to a heading of 0.
DepthScan beam_pair(double range, double max_range = 7.0) {
  DepthScan scan;
  scan.ranges = {range, range};
  scan.max_range = max_range;
  scan.fov = 0.0;  // both beams straight ahead
  return scan;
}

double bernoulli_entropy(double p) {
  return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

/// Segment-supersampling raycast oracle: walks the segment in 1/100-cell
/// steps and records each newly entered cell, excluding the destination.
std::vector<CellIndex> supersample_ray(const GridSpec& spec, const Vec2& from,
                                       const Vec2& to) {
  const CellIndex dest = spec.cell_at(to);
  const double len = distance(from, to);
  const int steps =
      std::max(1, static_cast<int>(std::ceil(len / spec.resolution * 100.0)));
  std::vector<CellIndex> out;
  CellIndex prev{-1, -1};
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    const CellIndex c = spec.cell_at(from + (to - from) * t);
    if (c == prev || c == dest) continue;
    out.push_back(c);
    prev = c;
  }
  return out;
}

}  // namespace

TEST_CASE("classify partitions on the two probability thresholds") {
  OccupancyGrid grid(make_spec(4, 4));
  CHECK(grid.classify({0, 0}) == CellClass::Unknown);

  grid.set_probability({0, 0}, 0.75);
  CHECK(grid.classify({0, 0}) == CellClass::Obstacle);  // boundary inclusive

  grid.set_probability({1, 0}, 0.5);
  CHECK(grid.classify({1, 0}) == CellClass::Uncertain);

  grid.set_probability({2, 0}, 0.18);
  CHECK(grid.classify({2, 0}) == CellClass::Free);  // boundary inclusive

  grid.set_probability({3, 0}, 0.12);
  CHECK(grid.classify({3, 0}) == CellClass::Free);

  CHECK_THROWS_AS((void)grid.classify({4, 0}), std::out_of_range);
}

TEST_CASE("single hit on an Unknown cell lands exactly at p_hit") {
  OccupancyGrid grid(make_spec(40, 40));
  const Pose sensor{0.375, 0.375, 0.0};
  grid.integrate_scan(sensor, beam_pair(2.0));
  const CellIndex end = grid.spec().cell_at({2.375, 0.375});
  CHECK(grid.probability(end) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("repeated hits saturate at the near and far clamps") {
  OccupancyGrid grid(make_spec(40, 40));
  const Pose sensor{0.375, 0.375, 0.0};
  for (int i = 0; i < 10; ++i) grid.integrate_scan(sensor, beam_pair(2.0));
  const CellIndex near = grid.spec().cell_at({2.375, 0.375});
  CHECK(grid.probability(near) == doctest::Approx(0.85).epsilon(1e-12));

  for (int i = 0; i < 10; ++i) grid.integrate_scan(sensor, beam_pair(5.0));
  const CellIndex far = grid.spec().cell_at({5.375, 0.375});
  CHECK(grid.probability(far) == doctest::Approx(0.7).epsilon(1e-12));

  // Clamp idempotence: one more identical scan changes nothing.
  const double before_near = grid.log_odds(near);
  const double before_far = grid.log_odds(far);
  grid.integrate_scan(sensor, beam_pair(2.0));
  grid.integrate_scan(sensor, beam_pair(5.0));
  CHECK(grid.log_odds(near) == before_near);
  CHECK(grid.log_odds(far) == before_far);
}

TEST_CASE("traversed cells receive miss updates and become known") {
  OccupancyGrid grid(make_spec(40, 40));
  const Pose sensor{0.375, 0.375, 0.0};
  grid.integrate_scan(sensor, beam_pair(5.0));
  // A single miss leaves a cell just above the Free threshold (p_miss 0.2
  // vs p_l 0.18); a second scan pushes it under.
  const CellIndex mid = grid.spec().cell_at({3.0, 0.375});
  CHECK(grid.probability(mid) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(grid.classify(mid) == CellClass::Uncertain);
  grid.integrate_scan(sensor, beam_pair(5.0));
  CHECK(grid.classify(mid) == CellClass::Free);
  // No traversed cell stays Unknown.
  for (int cx = 1; cx < 21; ++cx)
    CHECK(grid.known({cx, 1}));
}

TEST_CASE("a cell hit by one beam takes no miss from other beams that scan") {
  OccupancyGrid grid(make_spec(40, 40));
  DepthScan scan;
  scan.fov = 2.0 * std::atan2(0.25, 5.0);  // second beam one cell row up at 5m
  scan.ranges = {5.0, 2.0};
  const Pose sensor{0.125, 0.125, 0.0};
  grid.integrate_scan(sensor, scan);
  // Beam 1 ends inside a cell beam 0 traverses; the hit wins.
  const double a0 = scan.azimuth(1);
  const Vec2 end{0.125 + 2.0 * std::cos(a0), 0.125 + 2.0 * std::sin(a0)};
  CHECK(grid.probability(grid.spec().cell_at(end)) ==
        doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("max-range beams only clear, including their truncation cell") {
  OccupancyGrid grid(make_spec(40, 40));
  const Pose sensor{0.375, 0.375, 0.0};
  DepthScan scan = beam_pair(DepthScan::kMaxRange);
  grid.integrate_scan(sensor, scan);
  const CellIndex shell = grid.spec().cell_at({7.375, 0.375});
  CHECK(grid.probability(shell) == doctest::Approx(0.2).epsilon(1e-12));
  for (int cx = 1; cx <= shell.cx; ++cx)
    CHECK(grid.probability({cx, 1}) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("ranges beyond the scan's mapping range clear instead of hitting") {
  OccupancyGrid grid(make_spec(40, 40));
  const Pose sensor{0.375, 0.375, 0.0};
  grid.integrate_scan(sensor, beam_pair(5.0, 3.5));  // capped at 3.5 m
  const CellIndex at_cap = grid.spec().cell_at({3.875, 0.375});
  CHECK(grid.probability(at_cap) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK_FALSE(grid.known(grid.spec().cell_at({5.375, 0.375})));
  // A return exactly at the mapping range is still a surface return.
  grid.integrate_scan(sensor, beam_pair(3.5, 3.5));
  const CellIndex end = grid.spec().cell_at(
      {0.375 + 3.5, 0.375});
  CHECK(grid.probability(end) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("NaN ranges are skipped and counted") {
  OccupancyGrid grid(make_spec(40, 40));
  DepthScan scan = beam_pair(2.0);
  scan.ranges[1] = std::numeric_limits<double>::quiet_NaN();
  const ScanStats stats = grid.integrate_scan({0.375, 0.375, 0.0}, scan);
  CHECK(stats.beams_used == 1);
  CHECK(stats.beams_skipped == 1);
}

TEST_CASE("integrate_scan rejects bad sensor poses") {
  OccupancyGrid grid(make_spec(10, 10));
  CHECK_THROWS_AS(grid.integrate_scan({-1.0, 0.5, 0.0}, beam_pair(1.0)),
                  std::out_of_range);
  CHECK_THROWS_AS(grid.integrate_scan({0.5, 0.5, std::nullopt}, beam_pair(1.0)),
                  std::invalid_argument);
}

TEST_CASE("raycast degenerate and axis-aligned cases") {
  OccupancyGrid grid(make_spec(10, 10));
  CHECK(grid.raycast({0.3, 0.3}, {0.4, 0.4}).empty());

  // Axis-aligned across 4 cells: origin + 3 intermediates, in order.
  const auto cells = grid.raycast({0.125, 0.125}, {1.125, 0.125});
  REQUIRE(cells.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(cells[i] == CellIndex{i, 0});
}

TEST_CASE("raycast at exactly 45 degrees steps diagonally through corners") {
  OccupancyGrid grid(make_spec(10, 10));
  const Vec2 from{0.125, 0.125};
  const Vec2 to{1.125, 1.125};
  const auto cells = grid.raycast(from, to);
  const auto oracle = supersample_ray(grid.spec(), from, to);
  REQUIRE(cells.size() == oracle.size());
  for (std::size_t i = 0; i < cells.size(); ++i) CHECK(cells[i] == oracle[i]);
  REQUIRE(cells.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(cells[i] == CellIndex{i, i});
}

TEST_CASE("raycast matches the supersampling oracle on 1000 random rays") {
  OccupancyGrid grid(make_spec(32, 32));
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.01, 7.99);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec2 from{u(rng), u(rng)};
    const Vec2 to{u(rng), u(rng)};
    const auto cells = grid.raycast(from, to);
    const auto oracle = supersample_ray(grid.spec(), from, to);
    REQUIRE_MESSAGE(cells.size() == oracle.size(), "trial ", trial);
    for (std::size_t i = 0; i < cells.size(); ++i)
      CHECK_MESSAGE(cells[i] == oracle[i], "trial ", trial, " index ", i);
  }
}

TEST_CASE("entropy values and symmetry") {
  OccupancyGrid grid(make_spec(4, 4));
  CHECK(grid.entropy({0, 0}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));  // Unknown -> p=0.5

  grid.set_probability({1, 0}, 0.85);
  CHECK(grid.entropy({1, 0}) ==
        doctest::Approx(bernoulli_entropy(0.85)).epsilon(1e-12));
  CHECK(grid.entropy({1, 0}) == doctest::Approx(0.4227).epsilon(1e-3));

  grid.set_probability({2, 0}, 0.12);
  CHECK(grid.entropy({2, 0}) ==
        doctest::Approx(bernoulli_entropy(0.12)).epsilon(1e-12));
  CHECK(grid.entropy({2, 0}) == doctest::Approx(0.3669).epsilon(1e-3));

  // H(p) = H(1-p), and the maximum is at p = 0.5.
  for (double p : {0.12, 0.2, 0.3, 0.45}) {
    grid.set_probability({3, 0}, p);
    const double h = grid.entropy({3, 0});
    grid.set_probability({3, 0}, 1.0 - p);
    CHECK(grid.entropy({3, 0}) == doctest::Approx(h).epsilon(1e-12));
    CHECK(h < std::log(2.0));
  }
}

TEST_CASE("visibility is the free-probability product over the ray") {
  OccupancyGrid grid(make_spec(10, 10));
  // Two traversed Free cells at the lower clamp: 0.88^2.
  grid.set_probability({1, 0}, 0.12);
  grid.set_probability({2, 0}, 0.12);
  CHECK(grid.visibility({0.125, 0.125}, {3, 0}) ==
        doctest::Approx(0.7744).epsilon(1e-12));

  // Adjacent cell: empty traversal, probability 1.
  CHECK(grid.visibility({0.125, 0.125}, {1, 0}) == 1.0);

  // One Obstacle cell at 0.85 and one Free at 0.12: 0.15 * 0.88.
  grid.set_probability({1, 0}, 0.85);
  CHECK(grid.visibility({0.125, 0.125}, {3, 0}) ==
        doctest::Approx(0.132).epsilon(1e-12));

  // Raising any traversed cell's occupancy never increases visibility.
  const double before = grid.visibility({0.125, 0.125}, {5, 0});
  grid.set_probability({4, 0}, 0.6);
  CHECK(grid.visibility({0.125, 0.125}, {5, 0}) <= before);
}

TEST_CASE("mask_hypothesis_region dilates U/N seeds into a Manhattan ball") {
  OccupancyGrid snapshot(make_spec(30, 30));
  for (int cy = 0; cy < 30; ++cy)
    for (int cx = 0; cx < 30; ++cx) snapshot.set_probability({cx, cy}, 0.12);

  // One Uncertain seed on the path, far from the path endpoints.
  snapshot.set_probability({15, 15}, 0.5);
  Path path;
  for (int cx = 2; cx <= 27; ++cx)
    path.poses.push_back({snapshot.spec().center({cx, 15}).x,
                          snapshot.spec().center({cx, 15}).y, std::nullopt});
  const Pose start = path.front();
  const Pose goal = path.back();

  snapshot.mask_hypothesis_region(path, 4, start, goal, Footprint::block3x3());

  int masked = 0;
  for (int cy = 0; cy < 30; ++cy)
    for (int cx = 0; cx < 30; ++cx)
      if (snapshot.classify({cx, cy}) == CellClass::Obstacle) ++masked;
  // Manhattan ball of radius 4: 41 cells, none excluded here.
  CHECK(masked == 41);
  for (int d = 0; d <= 4; ++d)
    CHECK(snapshot.classify({15 + d, 15 + (4 - d)}) == CellClass::Obstacle);
  CHECK(snapshot.classify({15, 20}) == CellClass::Free);
}

TEST_CASE("mask_hypothesis_region spares start/goal surroundings and "
          "leaves clean paths alone") {
  OccupancyGrid grid(make_spec(20, 20));
  for (int cy = 0; cy < 20; ++cy)
    for (int cx = 0; cx < 20; ++cx) grid.set_probability({cx, cy}, 0.12);

  Path path;
  for (int cx = 2; cx <= 17; ++cx)
    path.poses.push_back({grid.spec().center({cx, 10}).x,
                          grid.spec().center({cx, 10}).y, std::nullopt});

  // All-Free path: masking is a no-op.
  OccupancyGrid copy = grid;
  copy.mask_hypothesis_region(path, 4, path.front(), path.back(),
                              Footprint::block3x3());
  for (int cy = 0; cy < 20; ++cy)
    for (int cx = 0; cx < 20; ++cx)
      CHECK(copy.log_odds({cx, cy}) == grid.log_odds({cx, cy}));

  // A seed adjacent to the goal pose dilates, but the goal surroundings
  // stay unmasked (exclusion radius = footprint radius + 1).
  copy.set_probability({16, 10}, 0.5);
  copy.mask_hypothesis_region(path, 4, path.front(), path.back(),
                              Footprint::block3x3());
  CHECK(copy.classify({17, 10}) != CellClass::Obstacle);
  CHECK(copy.classify({16, 10}) != CellClass::Obstacle);
  CHECK(copy.classify({12, 10}) == CellClass::Obstacle);  // outside exclusion
}

TEST_CASE("serialize/deserialize round-trips probabilities and Unknown") {
  OccupancyGrid grid(make_spec(6, 5, 0.25, {-1.0, 2.0}));
  grid.set_probability({1, 1}, 0.7);
  grid.set_probability({2, 3}, 0.12);
  grid.set_probability({5, 4}, 0.85);

  std::stringstream ss;
  grid.serialize(ss);
  const OccupancyGrid back = OccupancyGrid::deserialize(ss);

  CHECK(back.spec().width == 6);
  CHECK(back.spec().height == 5);
  CHECK(back.spec().origin.x == -1.0);
  for (int cy = 0; cy < 5; ++cy)
    for (int cx = 0; cx < 5; ++cx) {
      CHECK(back.known({cx, cy}) == grid.known({cx, cy}));
      if (grid.known({cx, cy}))
        CHECK(back.probability({cx, cy}) ==
              doctest::Approx(grid.probability({cx, cy})).epsilon(1e-5));
    }
}
