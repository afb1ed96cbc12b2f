#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "drivesim/geometry.hpp"
#include "oracles.hpp"

using namespace drivesim;
using drivesim::test::overlap_oracle;

namespace {

constexpr double kPi = std::numbers::pi;

bool same_point_set(std::array<Vec2, 4> a, std::array<Vec2, 4> b, double tol) {
  for (const auto& p : a) {
    const bool found = std::any_of(b.begin(), b.end(), [&](Vec2 q) { return distance(p, q) < tol; });
    if (!found) return false;
  }
  return true;
}

}  // namespace

TEST(Angle, NormalizesIntoHalfOpenRange) {
  EXPECT_DOUBLE_EQ(normalize_angle(kPi), kPi);
  EXPECT_DOUBLE_EQ(normalize_angle(-kPi), kPi);
  EXPECT_NEAR(normalize_angle(3 * kPi), kPi, 1e-12);
  EXPECT_NEAR(normalize_angle(-kPi / 2 - 4 * kPi), -kPi / 2, 1e-12);
  EXPECT_EQ(normalize_angle(0.25), 0.25);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-100.0, 100.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = normalize_angle(d(rng));
    EXPECT_GT(a, -kPi);
    EXPECT_LE(a, kPi);
  }
}

TEST(Angle, PoseStoresNormalizedHeading) {
  Pose2 p(1.0, 2.0, 7.0);
  EXPECT_NEAR(p.psi(), 7.0 - 2 * kPi, 1e-12);
  p.set_psi(-kPi);
  EXPECT_EQ(p.psi(), kPi);
}

TEST(RectCorners, UnitSquareAxisAligned) {
  const auto c = rect_corners({Pose2(0, 0, 0), 1.0, 1.0});
  EXPECT_EQ(c[0], (Vec2{0.5, 0.5}));
  EXPECT_EQ(c[1], (Vec2{-0.5, 0.5}));
  EXPECT_EQ(c[2], (Vec2{-0.5, -0.5}));
  EXPECT_EQ(c[3], (Vec2{0.5, -0.5}));
}

TEST(RectCorners, HalfTurnGivesSameSetReordered) {
  const auto a = rect_corners({Pose2(0, 0, 0), 1.0, 1.0});
  const auto b = rect_corners({Pose2(0, 0, kPi), 1.0, 1.0});
  EXPECT_TRUE(same_point_set(a, b, 1e-12));
  EXPECT_GT(distance(a[0], b[0]), 0.5);
}

TEST(RectCorners, RotatedLongRect) {
  const auto c = rect_corners({Pose2(1, 1, kPi / 2), 4.0, 2.0});
  const std::array<Vec2, 4> expected = {Vec2{0, 3}, Vec2{0, -1}, Vec2{2, -1}, Vec2{2, 3}};
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(c[i].x, expected[i].x, 1e-12);
    EXPECT_NEAR(c[i].y, expected[i].y, 1e-12);
  }
}

TEST(RectCorners, CounterclockwiseAndRotateWithHeading) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const OrientedRect r{Pose2(d(rng), d(rng), d(rng)), 1.0 + std::abs(d(rng)), 0.5 + std::abs(d(rng))};
    const auto c = rect_corners(r);
    for (int k = 0; k < 4; ++k) {
      EXPECT_GT(cross(c[(k + 1) % 4] - c[k], c[(k + 2) % 4] - c[(k + 1) % 4]), 0.0);
    }
    const double theta = d(rng);
    OrientedRect turned = r;
    turned.center.set_psi(r.center.psi() + theta);
    const auto t = rect_corners(turned);
    for (int k = 0; k < 4; ++k) {
      const Vec2 rel = c[k] - r.center.position();
      const Vec2 rot{std::cos(theta) * rel.x - std::sin(theta) * rel.y,
                     std::sin(theta) * rel.x + std::cos(theta) * rel.y};
      EXPECT_NEAR(t[k].x, r.center.x + rot.x, 1e-9);
      EXPECT_NEAR(t[k].y, r.center.y + rot.y, 1e-9);
    }
  }
}

TEST(RectsOverlap, IdenticalAndFar) {
  const OrientedRect a{Pose2(3, 4, 0.7), 2.0, 1.0};
  EXPECT_TRUE(rects_overlap(a, a));
  EXPECT_FALSE(rects_overlap({Pose2(0, 0, 0), 1, 1}, {Pose2(10, 0, 0), 1, 1}));
}

TEST(RectsOverlap, TouchingEdgesOverlap) {
  EXPECT_TRUE(rects_overlap({Pose2(0, 0, 0), 2, 1}, {Pose2(2, 0, 0), 2, 1}));
  EXPECT_TRUE(rects_overlap({Pose2(0, 0, 0), 2, 1}, {Pose2(2, 1, 0), 2, 1}));
  EXPECT_FALSE(rects_overlap({Pose2(0, 0, 0), 2, 1}, {Pose2(2.001, 0, 0), 2, 1}));
}

TEST(RectsOverlap, DiagonalExampleMatchesDenseSampling) {
  const OrientedRect a{Pose2(0, 0, 0), 2, 1};
  const OrientedRect b{Pose2(1.4, 0, kPi / 4), 2, 1};
  // 10^6 samples over b.
  const auto v = overlap_oracle(a, b, std::sqrt(2.0 / 1e6), 3);
  EXPECT_GT(v.margin, 0.01);
  EXPECT_EQ(rects_overlap(a, b), v.overlap);
  EXPECT_TRUE(v.overlap);
}

TEST(RectsOverlap, SymmetricAndRigidInvariant) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(-20.0, 20.0);
  for (int i = 0; i < 2000; ++i) {
    const auto [a, b] = drivesim::test::random_rect_pair(rng);
    const bool ab = rects_overlap(a, b);
    EXPECT_EQ(ab, rects_overlap(b, a));
    const RigidTransform t{d(rng), {d(rng), d(rng)}};
    const auto v = overlap_oracle(a, b, 0.02, i);
    // Only compare where the verdict is far from the boundary; the transformed pair can
    // differ by rounding right at contact.
    if (v.margin > drivesim::test::kOracleStopDepth) {
      EXPECT_EQ(ab, rects_overlap(t.apply(a), t.apply(b)));
    }
  }
}

TEST(RectsOverlap, AgreesWithSamplingOracle) {
  std::mt19937_64 rng(5);
  int compared = 0;
  int disagreements = 0;
  for (int i = 0; i < 300; ++i) {
    const auto [a, b] = drivesim::test::random_rect_pair(rng);
    const auto v = overlap_oracle(a, b, 0.005, 1000 + i);
    if (v.margin <= 0.01) continue;
    ++compared;
    if (v.overlap != rects_overlap(a, b)) ++disagreements;
  }
  EXPECT_GT(compared, 250);
  EXPECT_EQ(disagreements, 0);
}

TEST(PointInTriangle, CentroidEdgeAndOutside) {
  const Triangle t{{0, 0}, {4, 0}, {0, 3}};
  EXPECT_TRUE(point_in_triangle({4.0 / 3, 1.0}, t));
  EXPECT_TRUE(point_in_triangle({2, 0}, t));
  EXPECT_TRUE(point_in_triangle({2, 1.5}, t));
  EXPECT_TRUE(point_in_triangle({0, 0}, t));
  EXPECT_FALSE(point_in_triangle({5, 5}, t));
  EXPECT_FALSE(point_in_triangle({-0.1, 1}, t));
  const Triangle cw{{0, 0}, {0, 3}, {4, 0}};
  EXPECT_TRUE(point_in_triangle({1, 1}, cw));
}

TEST(PointInTriangle, DegenerateContainsNothing) {
  const Triangle line{{0, 0}, {1, 1}, {2, 2}};
  EXPECT_TRUE(line.degenerate());
  EXPECT_FALSE(point_in_triangle({1, 1}, line));
  EXPECT_FALSE(point_in_triangle({0, 0}, line));
}

TEST(PointInTriangle, AgreesWithCrossProductSigns) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  for (int i = 0; i < 20000; ++i) {
    const Triangle t{{d(rng), d(rng)}, {d(rng), d(rng)}, {d(rng), d(rng)}};
    const Vec2 p{d(rng), d(rng)};
    EXPECT_EQ(point_in_triangle(p, t), drivesim::test::triangle_oracle(p, t.a, t.b, t.c));
  }
}

TEST(Segments, ClipAgainstRect) {
  const OrientedRect r{Pose2(0, 0, 0), 2, 2};
  const auto hit = clip_segment_to_rect({-3, 0}, {3, 0}, r);
  ASSERT_TRUE(hit);
  // The closed-set tolerance widens the rect by 1e-9 m on each side.
  EXPECT_NEAR((*hit)[0], 1.0 / 3, 1e-9);
  EXPECT_NEAR((*hit)[1], 2.0 / 3, 1e-9);
  EXPECT_FALSE(segment_intersects_rect({-3, 2}, {3, 2}, r));
  EXPECT_TRUE(segment_intersects_rect({-3, 1}, {3, 1}, r));
  EXPECT_TRUE(segment_intersects_rect({0.1, 0.1}, {0.1, 0.1}, r));
  EXPECT_FALSE(segment_intersects_rect({-3, 0}, {-1.5, 0}, r));
}

TEST(Segments, PointDistance) {
  double t = -1;
  EXPECT_DOUBLE_EQ(point_segment_distance({1, 1}, {0, 0}, {2, 0}, &t), 1.0);
  EXPECT_DOUBLE_EQ(t, 0.5);
  EXPECT_DOUBLE_EQ(point_segment_distance({-3, 4}, {0, 0}, {2, 0}, &t), 5.0);
  EXPECT_DOUBLE_EQ(t, 0.0);
}

TEST(RigidTransform, ComposesRotationThenTranslation) {
  const RigidTransform t{kPi / 2, {1, 0}};
  const Vec2 p = t.apply(Vec2{1, 0});
  EXPECT_NEAR(p.x, 1.0, 1e-12);
  EXPECT_NEAR(p.y, 1.0, 1e-12);
  const Pose2 q = t.apply(Pose2(1, 0, kPi));
  EXPECT_NEAR(q.psi(), -kPi / 2, 1e-12);
}
