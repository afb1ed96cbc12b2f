#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "drivesim/errors.hpp"
#include "drivesim/golden.hpp"
#include "drivesim/renderer.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace drivesim;
using drivesim::test::bundled_map;
using drivesim::test::vehicle_world;

namespace {

MapBundle transform_map(const MapBundle& m, const RigidTransform& t) {
  MapBundle out;
  out.name = m.name;
  std::vector<Triangle> tris;
  for (const auto& tri : m.mesh.triangles()) tris.push_back({t.apply(tri.a), t.apply(tri.b), t.apply(tri.c)});
  out.mesh = DrivableMesh(tris, m.mesh.cell_size());
  for (const auto& lane : m.lanes) {
    Lane l{lane.id, {}};
    for (const auto& p : lane.points) l.points.push_back(t.apply(p));
    out.lanes.push_back(l);
  }
  for (const auto& s : m.stop_lines) out.stop_lines.push_back({t.apply(s.rect), s.control});
  out.controls = m.controls;
  for (auto& c : out.controls) c.rect = t.apply(c.rect);
  return out;
}

WorldState transform_world(const WorldState& w, const RigidTransform& t) {
  WorldState out = w;
  out.map = std::make_shared<const MapBundle>(transform_map(*w.map, t));
  for (auto& c : out.controls) c.rect = t.apply(c.rect);
  for (auto& [type, b] : out.agents) {
    for (auto& s : b.states) s.pose = t.apply(s.pose);
  }
  return out;
}

WorldState busy_world(const std::string& map_name, Vec2 ego, double psi) {
  WorldState w = vehicle_world(bundled_map(map_name), {{ego.x, ego.y, psi, 3},
                                                      {ego.x + 7.25, ego.y + 1.5, psi + 0.3, 2},
                                                      {ego.x - 6.5, ego.y - 3.0, psi - 2.0, 1}});
  w.controls = advance_controls(w.map->controls, 0);
  TrafficControl tl;
  tl.id = "extra";
  tl.kind = ControlKind::TrafficLight;
  tl.rect = {Pose2(ego.x + 4, ego.y, psi), 0.6, 4};
  tl.program = {{LightState::Red, 5}};
  w.controls.push_back(tl);
  w.controls = advance_controls(w.controls, 0);
  return w;
}

// Smallest signed distance from p to the edges of triangle abc, positive inside,
// regardless of winding. Degenerate triangles report -infinity.
double edge_depth(Vec2 p, Vec2 a, Vec2 b, Vec2 c) {
  const double area = cross(b - a, c - a);
  if (area == 0.0) return -INFINITY;
  const double sign = area > 0 ? 1.0 : -1.0;
  double depth = INFINITY;
  for (auto [u, v] : {std::pair{a, b}, std::pair{b, c}, std::pair{c, a}}) {
    depth = std::min(depth, sign * cross(v - u, p - u) / norm(v - u));
  }
  return depth;
}

std::size_t pixel_diff(const BirdviewFrame& a, const BirdviewFrame& b) {
  std::size_t n = 0;
  for (int r = 0; r < a.height; ++r) {
    for (int c = 0; c < a.width; ++c) n += a.pixel(c, r) == b.pixel(c, r) ? 0 : 1;
  }
  return n;
}

}  // namespace

TEST(Render, DummyBackendIsAllZero) {
  RenderConfig cfg;
  cfg.backend = RenderBackend::Dummy;
  cfg.width = 40;
  cfg.height = 24;
  const BirdviewFrame f = render_birdview(busy_world("four_way", {2, -10}, 1.0), cfg, Vec2{2, 0});
  EXPECT_EQ(f.pixels.size(), 40u * 24u * 3u);
  EXPECT_TRUE(std::all_of(f.pixels.begin(), f.pixels.end(), [](auto v) { return v == 0; }));
}

TEST(Render, BackendNames) {
  EXPECT_EQ(render_backend_from_name("cpu"), RenderBackend::Cpu);
  EXPECT_EQ(render_backend_from_name("dummy"), RenderBackend::Dummy);
  EXPECT_THROW(render_backend_from_name("pytorch3d"), BackendUnavailable);
}

TEST(Render, RejectsBadSize) {
  RenderConfig cfg;
  cfg.width = 0;
  EXPECT_THROW(render(WorldState{}, Pose2(), cfg), ConfigError);
  cfg.width = 64;
  cfg.meters_per_pixel = 0;
  EXPECT_THROW(render(WorldState{}, Pose2(), cfg), ConfigError);
}

TEST(Render, EmptyWorldIsUniformBackground) {
  RenderConfig cfg;
  cfg.colors.background = {10, 20, 30};
  const BirdviewFrame f = render(WorldState{}, Pose2(3, 4, 1), cfg);
  EXPECT_EQ(f.count_pixels({10, 20, 30}), 64u * 64u);
}

TEST(Render, EgoSitsAtThreeQuartersFacingUp) {
  const WorldState w = vehicle_world(bundled_map("straight_road"), {{100, 0, 0.4, 0}});
  const RenderConfig cfg;
  const BirdviewFrame f = render_birdview(w, cfg);
  EXPECT_EQ(f.pixel(32, 48), cfg.colors.ego);
  // 4.5 m long at 0.6 m/px: about 7.5 px tall, 3 px wide.
  EXPECT_EQ(f.pixel(32, 45), cfg.colors.ego);
  EXPECT_EQ(f.pixel(32, 51), cfg.colors.ego);
  EXPECT_NE(f.pixel(32, 53), cfg.colors.ego);
  EXPECT_NE(f.pixel(35, 48), cfg.colors.ego);
  const std::size_t ego_px = f.count_pixels(cfg.colors.ego);
  EXPECT_NEAR(static_cast<double>(ego_px), 4.5 * 1.8 / (0.6 * 0.6), 6.0);
}

TEST(Render, PaintOrder) {
  // NPC fully covers the ego footprint; the ego is painted last among agents.
  const WorldState w = vehicle_world(bundled_map("straight_road"), {{100, 0, 0, 0}, {100, 0, 0, 0}});
  const RenderConfig cfg;
  BirdviewFrame f = render_birdview(w, cfg);
  EXPECT_EQ(f.pixel(32, 48), cfg.colors.ego);
  EXPECT_EQ(f.count_pixels(cfg.colors.vehicle_npc), 0u);
  // Waypoint disc goes on top of everything.
  f = render_birdview(w, cfg, Vec2{100, 0});
  EXPECT_EQ(f.pixel(32, 48), cfg.colors.waypoint);
  const double disc = std::numbers::pi * std::pow(2.0 / 0.6, 2);
  EXPECT_NEAR(static_cast<double>(f.count_pixels(cfg.colors.waypoint)), disc, 6.0);
}

TEST(Render, LightsDrawnByStateSignsNot) {
  RenderConfig cfg;
  for (auto [state, color] : {std::pair{LightState::Red, cfg.colors.light_red},
                              std::pair{LightState::Green, cfg.colors.light_green},
                              std::pair{LightState::Yellow, cfg.colors.light_yellow}}) {
    WorldState w = vehicle_world(bundled_map("straight_road"), {{100, -2, 0, 0}});
    TrafficControl c;
    c.id = "x";
    c.kind = ControlKind::TrafficLight;
    c.rect = {Pose2(110, -2, 0), 1.2, 4};
    c.program = {{state, 3}};
    w.controls = advance_controls({c}, 0);
    EXPECT_GT(render_birdview(w, cfg).count_pixels(color), 0u);
  }
  WorldState w = vehicle_world(bundled_map("four_way"), {{2, -10, std::numbers::pi / 2, 0}});
  w.controls = advance_controls(w.map->controls, 0);
  const BirdviewFrame f = render_birdview(w, cfg);
  EXPECT_EQ(f.count_pixels(cfg.colors.light_red) + f.count_pixels(cfg.colors.light_green), 0u);
}

TEST(Render, LaneColorsFollowDirection) {
  const WorldState w = vehicle_world(bundled_map("straight_road"), {{100, 0, 0, 0}});
  const RenderConfig cfg;
  const BirdviewFrame f = render_birdview(w, cfg);
  // Heading up the screen: the eastbound lane (y = -2) is to the right of the ego.
  const int right_col = static_cast<int>(32 + 2.0 / 0.6);
  const int left_col = static_cast<int>(32 - 2.0 / 0.6);
  EXPECT_EQ(f.pixel(right_col, 20), cfg.colors.lane_right);
  EXPECT_EQ(f.pixel(left_col, 20), cfg.colors.lane_left);
}

TEST(Render, Deterministic) {
  const WorldState w = busy_world("roundabout", {16, 0}, 1.6);
  EXPECT_EQ(render_birdview(w, {}, Vec2{0, 16}), render_birdview(w, {}, Vec2{0, 16}));
}

TEST(Render, TranslationInvariant) {
  const std::vector<std::tuple<std::string, Vec2, double>> cases = {
      {"straight_road", {100, -2}, 0.0},   {"straight_road", {60.5, 1.25}, 2.5},
      {"four_way", {2, -12}, 1.5707963267948966}, {"four_way", {-3, 2}, 2.9},
      {"three_way", {-10, 2}, 3.14159},   {"roundabout", {16, 0}, 1.6},
      {"rural_road", {150, 1}, 0.8}};
  for (const auto& [name, ego, psi] : cases) {
    SCOPED_TRACE(name);
    const WorldState w = busy_world(name, ego, psi);
    for (Vec2 shift : {Vec2{1000, -500}, Vec2{-37, 211}, Vec2{0.5, 0.25}}) {
      const RigidTransform t{0.0, shift};
      const Vec2 wp = ego + Vec2{1, 6};
      const BirdviewFrame a = render_birdview(w, {}, wp);
      const BirdviewFrame b = render_birdview(transform_world(w, t), {}, t.apply(wp));
      EXPECT_EQ(pixel_diff(a, b), 0u);
    }
  }
}

TEST(Render, RotationConsistentWithinQuantization) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> ang(-3.14, 3.14);
  for (const char* name : drivesim::test::kBundledMaps) {
    const WorldState w = busy_world(name, bundled_map(name)->lanes[0].point_at(20), 0.3);
    for (int k = 0; k < 5; ++k) {
      const RigidTransform t{ang(rng), {0, 0}};
      const BirdviewFrame a = render_birdview(w, {});
      const BirdviewFrame b = render_birdview(transform_world(w, t), {});
      EXPECT_LT(static_cast<double>(pixel_diff(a, b)) / (64 * 64), 0.03) << name;
    }
  }
}

TEST(Raster, CoveringTriangleFillsFrame) {
  BirdviewFrame f(64, 64, 0.6, Pose2());
  rasterize_triangle(f, {-10, -10}, {200, -10}, {-10, 200}, {1, 2, 3});
  EXPECT_EQ(f.count_pixels({1, 2, 3}), 64u * 64u);
}

TEST(Raster, ZeroAreaLeavesFrame) {
  BirdviewFrame f(64, 64, 0.6, Pose2());
  rasterize_triangle(f, {0.5, 0.5}, {10.5, 10.5}, {20.5, 20.5}, {1, 2, 3});
  rasterize_triangle(f, {3.5, 3.5}, {3.5, 3.5}, {3.5, 3.5}, {1, 2, 3});
  EXPECT_EQ(f.count_pixels({1, 2, 3}), 0u);
}

TEST(Raster, SharedEdgesCoveredExactlyOnce) {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> d(-8, 72);
  // Half the cases snap vertices to pixel centers so edges pass exactly through samples.
  for (int trial = 0; trial < 400; ++trial) {
    std::array<Vec2, 4> q;
    for (auto& p : q) {
      p = {d(rng), d(rng)};
      if (trial % 2 == 0) p = {std::floor(p.x) + 0.5, std::floor(p.y) + 0.5};
    }
    std::vector<int> count(64 * 64, 0);
    auto visit = [&](int col, int row) { ++count[row * 64 + col]; };
    // Two triangles on either side of diagonal q0-q2 (any winding).
    for_each_covered_pixel(64, 64, q[0], q[1], q[2], visit);
    for_each_covered_pixel(64, 64, q[2], q[3], q[0], visit);
    const double s1 = cross(q[1] - q[0], q[2] - q[0]);
    const double s2 = cross(q[2] - q[0], q[3] - q[0]);
    const bool convex_split = s1 * s2 > 0;  // q1 and q3 on opposite sides of the diagonal
    // Vertices snap to 1/256 px, so away from exact pixel centers the oracle only rules
    // on samples clearly inside or outside.
    const double margin = trial % 2 == 0 ? 0.0 : 0.02;
    for (int row = 0; row < 64; ++row) {
      for (int col = 0; col < 64; ++col) {
        const Vec2 c{col + 0.5, row + 0.5};
        const double d1 = edge_depth(c, q[0], q[1], q[2]);
        const double d2 = edge_depth(c, q[2], q[3], q[0]);
        const int n = count[row * 64 + col];
        if (convex_split) {
          EXPECT_LE(n, 1);
          // Samples on the shared diagonal belong to exactly one side.
          if (trial % 2 == 0 && d1 == 0.0 && d2 == 0.0 && cross(q[2] - q[0], c - q[0]) == 0.0 &&
              drivesim::test::triangle_oracle(c, q[0], q[1], q[2]) && dot(c - q[0], c - q[2]) < 0.0) {
            EXPECT_EQ(n, 1);
          }
        }
        if (d1 > std::max(margin, 0.0) || d2 > std::max(margin, 0.0)) {
          EXPECT_GE(n, 1);
        }
        if (d1 < -margin && d2 < -margin) {
          EXPECT_EQ(n, 0);
        }
      }
    }
  }
}

TEST(Raster, FanAroundSharedVertexCoveredOnce) {
  // Eight triangles around a pixel center; the union is an octagon.
  const Vec2 center{31.5, 31.5};
  std::vector<Vec2> ring;
  for (int k = 0; k < 8; ++k) {
    const double a = k * std::numbers::pi / 4;
    ring.push_back({std::round(center.x + 20 * std::cos(a)) + 0.5, std::round(center.y + 20 * std::sin(a)) + 0.5});
  }
  std::vector<int> count(64 * 64, 0);
  for (int k = 0; k < 8; ++k) {
    for_each_covered_pixel(64, 64, center, ring[k], ring[(k + 1) % 8], [&](int col, int row) { ++count[row * 64 + col]; });
  }
  EXPECT_EQ(count[31 * 64 + 31], 1);
  for (int v : count) EXPECT_LE(v, 1);
}

TEST(Ppm, RoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "drivesim_roundtrip.ppm";
  const BirdviewFrame f = render_birdview(busy_world("four_way", {2, -10}, 1.2), {}, Vec2{2, 0});
  write_ppm(f, path);
  const BirdviewFrame g = read_ppm(path);
  EXPECT_EQ(g.width, f.width);
  EXPECT_EQ(g.height, f.height);
  EXPECT_EQ(g.pixels, f.pixels);
  std::filesystem::remove(path);
}

TEST(Golden, MatchesFrozenFixtures) {
  const auto cases = golden_cases(drivesim::test::kDataDir);
  ASSERT_GE(cases.size(), 3u);
  for (const auto& c : cases) {
    SCOPED_TRACE(c.name);
    const auto path = drivesim::test::kGoldenDir / (c.name + ".ppm");
    ASSERT_TRUE(std::filesystem::exists(path));
    EXPECT_EQ(c.render().pixels, read_ppm(path).pixels);
  }
}
