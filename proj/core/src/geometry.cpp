#include "drivesim/geometry.hpp"

#include <algorithm>
#include <limits>

namespace drivesim {

namespace {

constexpr double kPi = std::numbers::pi;
// Slack for boundary contact; keeps the closed-set convention robust to rounding of
// rotated corners.
constexpr double kContactEps = 1e-9;

struct Interval {
  double lo;
  double hi;
};

Interval project(const std::array<Vec2, 4>& corners, Vec2 axis) {
  Interval out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& c : corners) {
    const double d = dot(c, axis);
    out.lo = std::min(out.lo, d);
    out.hi = std::max(out.hi, d);
  }
  return out;
}

// Rectangle-local coordinates: u along heading, v to the left.
Vec2 to_local(Vec2 p, const OrientedRect& r) {
  const Vec2 d = p - r.center.position();
  const double c = std::cos(r.center.psi());
  const double s = std::sin(r.center.psi());
  return {c * d.x + s * d.y, -s * d.x + c * d.y};
}

}  // namespace

double normalize_angle(double a) {
  if (a > -kPi && a <= kPi) return a;
  double r = std::fmod(a + kPi, 2.0 * kPi);
  if (r <= 0.0) r += 2.0 * kPi;
  return r - kPi;
}

Vec2 RigidTransform::apply(Vec2 p) const {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * p.x - s * p.y + translation.x, s * p.x + c * p.y + translation.y};
}

Pose2 RigidTransform::apply(const Pose2& p) const {
  const Vec2 q = apply(p.position());
  return {q.x, q.y, p.psi() + angle};
}

OrientedRect RigidTransform::apply(const OrientedRect& r) const {
  return {apply(r.center), r.length, r.width};
}

std::array<Vec2, 4> rect_corners(const OrientedRect& r) {
  const Vec2 f = 0.5 * r.length * r.center.heading();
  const Vec2 l = 0.5 * r.width * Vec2{-std::sin(r.center.psi()), std::cos(r.center.psi())};
  const Vec2 c = r.center.position();
  return {c + f + l, c - f + l, c - f - l, c + f - l};
}

bool rects_overlap(const OrientedRect& a, const OrientedRect& b) {
  const auto ca = rect_corners(a);
  const auto cb = rect_corners(b);
  const std::array<Vec2, 4> axes = {
      a.center.heading(), Vec2{-std::sin(a.center.psi()), std::cos(a.center.psi())},
      b.center.heading(), Vec2{-std::sin(b.center.psi()), std::cos(b.center.psi())}};
  for (const auto& axis : axes) {
    const Interval ia = project(ca, axis);
    const Interval ib = project(cb, axis);
    if (ia.hi < ib.lo - kContactEps || ib.hi < ia.lo - kContactEps) return false;
  }
  return true;
}

bool point_in_rect(Vec2 p, const OrientedRect& r) {
  const Vec2 q = to_local(p, r);
  return std::abs(q.x) <= 0.5 * r.length + kContactEps &&
         std::abs(q.y) <= 0.5 * r.width + kContactEps;
}

bool point_in_triangle(Vec2 p, const Triangle& t) {
  if (t.degenerate()) return false;
  const double d1 = cross(t.b - t.a, p - t.a);
  const double d2 = cross(t.c - t.b, p - t.b);
  const double d3 = cross(t.a - t.c, p - t.c);
  const bool has_neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
  const bool has_pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
  return !(has_neg && has_pos);
}

std::optional<std::array<double, 2>> clip_segment_to_rect(Vec2 p0, Vec2 p1,
                                                          const OrientedRect& r) {
  const Vec2 a = to_local(p0, r);
  const Vec2 b = to_local(p1, r);
  const Vec2 d = b - a;
  const double hx = 0.5 * r.length + kContactEps;
  const double hy = 0.5 * r.width + kContactEps;
  double t0 = 0.0;
  double t1 = 1.0;
  // Liang-Barsky against the four slabs.
  const std::array<double, 4> p = {-d.x, d.x, -d.y, d.y};
  const std::array<double, 4> q = {a.x + hx, hx - a.x, a.y + hy, hy - a.y};
  for (std::size_t i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return std::nullopt;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    if (t0 > t1) return std::nullopt;
  }
  return std::array<double, 2>{t0, t1};
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b, double* t_out) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  if (t_out != nullptr) *t_out = t;
  return distance(p, a + t * ab);
}

}  // namespace drivesim
