#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>

namespace drivesim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

// Maps any finite angle into (-pi, pi].
double normalize_angle(double a);

// Signed smallest rotation taking `from` onto `to`, in (-pi, pi].
inline double angle_diff(double to, double from) { return normalize_angle(to - from); }

// Planar pose. Heading is counterclockwise from +x and is kept in (-pi, pi] on every write.
class Pose2 {
 public:
  Pose2() = default;
  Pose2(double x, double y, double psi) : x(x), y(y), psi_(normalize_angle(psi)) {}

  double psi() const { return psi_; }
  void set_psi(double psi) { psi_ = normalize_angle(psi); }
  Vec2 position() const { return {x, y}; }
  Vec2 heading() const { return {std::cos(psi_), std::sin(psi_)}; }

  friend bool operator==(const Pose2&, const Pose2&) = default;

  double x = 0.0;
  double y = 0.0;

 private:
  double psi_ = 0.0;
};

struct OrientedRect {
  Pose2 center;
  double length = 0.0;  // along heading
  double width = 0.0;   // perpendicular to heading

  friend bool operator==(const OrientedRect&, const OrientedRect&) = default;
};

struct Triangle {
  Vec2 a;
  Vec2 b;
  Vec2 c;

  // Twice the signed area; positive for counterclockwise winding.
  double signed_area2() const { return cross(b - a, c - a); }
  bool degenerate() const { return signed_area2() == 0.0; }

  friend bool operator==(const Triangle&, const Triangle&) = default;
};

struct Aabb {
  Vec2 min;
  Vec2 max;

  bool contains(Vec2 p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  friend bool operator==(const Aabb&, const Aabb&) = default;
};

// Rigid motion: rotate by `angle` about the origin, then translate.
struct RigidTransform {
  double angle = 0.0;
  Vec2 translation;

  Vec2 apply(Vec2 p) const;
  Pose2 apply(const Pose2& p) const;
  OrientedRect apply(const OrientedRect& r) const;
};

// Corners in counterclockwise order starting at the front-left corner of the local frame.
std::array<Vec2, 4> rect_corners(const OrientedRect& r);

// Closed-set separating-axis test: touching rectangles overlap.
bool rects_overlap(const OrientedRect& a, const OrientedRect& b);

bool point_in_rect(Vec2 p, const OrientedRect& r);

// Closed triangle containment. Degenerate triangles contain nothing.
bool point_in_triangle(Vec2 p, const Triangle& t);

// Parameter range [t0, t1] within [0, 1] of the segment p0->p1 that lies inside the
// closed rectangle, or nullopt if the segment misses it.
std::optional<std::array<double, 2>> clip_segment_to_rect(Vec2 p0, Vec2 p1,
                                                          const OrientedRect& r);

inline bool segment_intersects_rect(Vec2 p0, Vec2 p1, const OrientedRect& r) {
  return clip_segment_to_rect(p0, p1, r).has_value();
}

// Distance from p to segment a-b, with the clamped projection parameter in [0, 1].
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b, double* t_out = nullptr);

}  // namespace drivesim
