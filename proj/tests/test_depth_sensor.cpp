#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gridnav/depth_sensor.hpp"

using namespace gridnav;

namespace {

WorldModel box_world(std::vector<Box> boxes) {
  WorldModel w;
  w.name = "test";
  w.bounds = {-10.0, -10.0, 10.0, 10.0};
  w.obstacles = std::move(boxes);
  return w;
}

SensorSpec narrow_spec(double fov_deg, int beams) {
  SensorSpec s;
  s.fov_deg = fov_deg;
  s.beams = beams;
  return s;
}

}  // namespace

TEST_CASE("render_truth measures exact distances and flags open beams") {
  // Wall 2 m ahead, perpendicular to the central beam.
  const WorldModel w = box_world({{2.0, -3.0, 2.5, 3.0}});
  const SensorSpec spec = narrow_spec(40.0, 41);
  const DepthScan scan = render_truth(w, {0.0, 0.0, 0.0}, spec);

  CHECK(scan.ranges[20] == doctest::Approx(2.0).epsilon(1e-12));
  // Off-axis beams measure the slant distance 2 / cos(phi).
  for (int i = 0; i < spec.beams; ++i) {
    const double phi = spec.azimuth(i);
    CHECK(scan.ranges[i] == doctest::Approx(2.0 / std::cos(phi)).epsilon(1e-9));
  }
}

TEST_CASE("render_truth keeps far surfaces uncapped and flags empty space") {
  const WorldModel far_wall = box_world({{9.0, -9.0, 9.5, 9.0}});
  const SensorSpec spec = narrow_spec(10.0, 11);
  const DepthScan scan = render_truth(far_wall, {0.0, 0.0, 0.0}, spec);
  CHECK(scan.ranges[5] == doctest::Approx(9.0).epsilon(1e-12));  // beyond 7 m

  const WorldModel empty = box_world({});
  const DepthScan open_scan = render_truth(empty, {0.0, 0.0, 0.0}, spec);
  for (const double r : open_scan.ranges) CHECK(DepthScan::is_max_range(r));
}

TEST_CASE("render_truth at 45 degree incidence matches the closed form") {
  // Wall along x = 3; sensor heading 45 degrees off the wall normal.
  const WorldModel w = box_world({{3.0, -20.0, 3.5, 20.0}});
  const SensorSpec spec = narrow_spec(30.0, 31);
  const Pose pose{0.0, 0.0, M_PI / 4.0};
  const DepthScan scan = render_truth(w, pose, spec);
  for (int i = 0; i < spec.beams; ++i) {
    const double ang = *pose.theta + spec.azimuth(i);
    CHECK(scan.ranges[i] == doctest::Approx(3.0 / std::cos(ang)).epsilon(1e-9));
  }
}

TEST_CASE("render_truth rejects poses inside obstacles") {
  const WorldModel w = box_world({{-1.0, -1.0, 1.0, 1.0}});
  CHECK_THROWS_AS(render_truth(w, {0.0, 0.0, 0.0}, SensorSpec{}),
                  std::domain_error);
}

TEST_CASE("detect_edges finds discontinuities and relocates to the near side") {
  DepthScan scan;
  scan.ranges.assign(200, 2.0);
  for (int i = 100; i < 200; ++i) scan.ranges[i] = 5.0;

  SUBCASE("step up relocates onto the nearer (lower) index") {
    const auto edges = detect_edges(scan, 0.5);
    REQUIRE(edges.size() == 1);
    CHECK(edges[0] == 99);
  }
  SUBCASE("step down relocates onto the nearer (higher) index") {
    std::reverse(scan.ranges.begin(), scan.ranges.end());
    const auto edges = detect_edges(scan, 0.5);
    REQUIRE(edges.size() == 1);
    CHECK(edges[0] == 100);
  }
  SUBCASE("constant scan and sub-threshold steps yield nothing") {
    CHECK(detect_edges(scan, 4.0).empty());
    DepthScan flat;
    flat.ranges.assign(50, 3.3);
    CHECK(detect_edges(flat, 0.5).empty());
  }
  SUBCASE("jumps against max-range returns are ignored") {
    scan.ranges[100] = DepthScan::kMaxRange;
    const auto edges = detect_edges(scan, 0.5);
    REQUIRE(edges.size() == 1);
    CHECK(edges[0] == 100);  // only the 7m-to-5m step at 100->101 remains
  }
}

TEST_CASE("noise_candidate evaluates the displayed deterministic term") {
  // rho * i * (w - d) * max(0, i - s)^2 = 0.01 * 5 * 10 * 4 = 2.0
  CHECK(noise_candidate(5.0, 0, SensorSpec{}, NoiseParams::low()) ==
        doctest::Approx(2.0).epsilon(1e-12));
  // Inside the perfect-sensing radius the term vanishes.
  CHECK(noise_candidate(2.5, 0, SensorSpec{}, NoiseParams::high()) == 0.0);
}

TEST_CASE("zero-parameter noise is the identity on rendered scans") {
  const WorldModel w =
      box_world({{4.0, -1.0, 4.5, 1.0}, {2.0, -4.0, 2.5, -2.0}});
  const SensorSpec spec = narrow_spec(107.0, 672);
  std::mt19937_64 rng(1);
  const DepthScan truth = render_truth(w, {0.0, 0.0, 0.0}, spec);
  const DepthScan noisy = sense(w, {0.0, 0.0, 0.0}, spec, NoiseParams::off(), rng);
  REQUIRE(noisy.ranges.size() == truth.ranges.size());
  for (std::size_t i = 0; i < truth.ranges.size(); ++i) {
    if (DepthScan::is_max_range(truth.ranges[i]))
      CHECK(DepthScan::is_max_range(noisy.ranges[i]));
    else
      CHECK(noisy.ranges[i] == truth.ranges[i]);  // bit-identical
  }
}

TEST_CASE("corruption only pushes ranges outward, up to the mapping range") {
  // An obstacle edge at ~5 m against a deep background produces strong
  // corruption under the high preset.
  const WorldModel w = box_world({{5.0, -5.0, 5.5, 0.0}, {9.0, -9.5, 9.5, 9.5}});
  const SensorSpec spec = narrow_spec(60.0, 121);
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const DepthScan truth = render_truth(w, {0.0, 0.0, 0.0}, spec);
    const DepthScan noisy =
        sense(w, {0.0, 0.0, 0.0}, spec, NoiseParams::high(), rng);
    for (std::size_t i = 0; i < truth.ranges.size(); ++i) {
      const double t = truth.ranges[i];
      if (DepthScan::is_max_range(t)) continue;
      // Never decreased, apart from the final clip to max_range.
      CHECK(noisy.ranges[i] >= std::min(t, spec.max_range) - 1e-12);
      CHECK(noisy.ranges[i] <= std::max(t, spec.max_range) + 1e-12);
    }
  }
}

TEST_CASE("beams within the perfect-sensing radius are untouched") {
  DepthScan scan;
  scan.ranges.assign(40, 2.9);  // all within 3 m
  scan.ranges[20] = 2.2;        // a genuine >0.5 m discontinuity
  const auto edges = detect_edges(scan, 0.5);
  CHECK_FALSE(edges.empty());
  std::mt19937_64 rng(5);
  const DepthScan out = corrupt(scan, edges, SensorSpec{}, NoiseParams::high(), rng);
  for (std::size_t i = 0; i < scan.ranges.size(); ++i)
    CHECK(out.ranges[i] == scan.ranges[i]);
}

TEST_CASE("corruption magnitude scales with the squared distance beyond the "
          "perfect-sensing radius") {
  // Monte-Carlo slope test: mean corrupted value at the edge beam,
  // normalized by rho*i*(w-d), grows as d(s,i)^2. The sensor's mapping
  // range is lifted so the clip does not censor the samples.
  SensorSpec spec;
  spec.max_range = 100.0;
  const NoiseParams params = NoiseParams::high();
  std::mt19937_64 rng(1234);

  auto mean_normalized = [&](double range) {
    DepthScan scan;
    scan.ranges.assign(2 * spec.window + 1, range);
    scan.max_range = spec.max_range;
    const std::vector<int> edges{spec.window};
    double sum = 0.0;
    const int samples = 10000;
    for (int i = 0; i < samples; ++i) {
      const DepthScan out = corrupt(scan, edges, spec, params, rng);
      sum += out.ranges[spec.window];
    }
    return (sum / samples) / (params.rho * range * spec.window);
  };

  const double dsi1 = 1.6, dsi2 = 3.5;
  const double m1 = mean_normalized(spec.perfect_range + dsi1);
  const double m2 = mean_normalized(spec.perfect_range + dsi2);
  const double slope = std::log(m2 / m1) / std::log(dsi2 / dsi1);
  CHECK(slope == doctest::Approx(2.0).epsilon(0.075));  // 2 +/- 0.15
}

TEST_CASE("overlapping windows accumulate with the elementwise max") {
  // Two manually supplied edges whose windows overlap: the shared beam must
  // equal the max of the two single-edge corruptions. Noise variance is
  // zeroed so the candidates are deterministic.
  SensorSpec spec;
  spec.max_range = 100.0;
  NoiseParams det{0.05, 0.125, 0.0};  // sd 0 -> sigma equals its mean
  DepthScan scan;
  scan.ranges.assign(30, 6.0);
  std::mt19937_64 rng(1);

  const DepthScan both = corrupt(scan, {8, 14}, spec, det, rng);
  const DepthScan only_a = corrupt(scan, {8}, spec, det, rng);
  const DepthScan only_b = corrupt(scan, {14}, spec, det, rng);
  for (int i = 0; i < 30; ++i)
    CHECK(both.ranges[i] ==
          doctest::Approx(std::max(only_a.ranges[i], only_b.ranges[i]))
              .epsilon(1e-12));
}

TEST_CASE("sense is deterministic given the generator state") {
  const WorldModel w = box_world({{4.0, -2.0, 4.5, 2.0}, {9.0, -9.0, 9.5, 9.0}});
  const SensorSpec spec = narrow_spec(107.0, 672);
  std::mt19937_64 rng_a(77), rng_b(77);
  const DepthScan a = sense(w, {0.0, 0.0, 0.1}, spec, NoiseParams::low(), rng_a);
  const DepthScan b = sense(w, {0.0, 0.0, 0.1}, spec, NoiseParams::low(), rng_b);
  REQUIRE(a.ranges.size() == b.ranges.size());
  for (std::size_t i = 0; i < a.ranges.size(); ++i) {
    if (DepthScan::is_max_range(a.ranges[i]))
      CHECK(DepthScan::is_max_range(b.ranges[i]));
    else
      CHECK(a.ranges[i] == b.ranges[i]);
  }
}
