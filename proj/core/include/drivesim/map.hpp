#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "drivesim/controls.hpp"
#include "drivesim/geometry.hpp"

namespace drivesim {

inline constexpr double kDefaultGridCell = 5.0;
inline constexpr double kDefaultLaneRadius = 10.0;

// Drivable surface with a uniform grid index over triangle bounding boxes.
class DrivableMesh {
 public:
  DrivableMesh() = default;
  DrivableMesh(std::vector<Triangle> triangles, double cell_size = kDefaultGridCell);

  const std::vector<Triangle>& triangles() const { return triangles_; }
  const Aabb& bounds() const { return bounds_; }
  double cell_size() const { return cell_size_; }
  std::size_t grid_columns() const { return cols_; }
  std::size_t grid_rows() const { return rows_; }
  const std::vector<std::uint32_t>& cell(std::size_t col, std::size_t row) const {
    return cells_[row * cols_ + col];
  }

  bool contains(Vec2 p) const;
  // Exhaustive scan; used as the reference for the grid query.
  bool contains_brute_force(Vec2 p) const;

  friend bool operator==(const DrivableMesh& a, const DrivableMesh& b) {
    return a.triangles_ == b.triangles_ && a.cell_size_ == b.cell_size_;
  }

 private:
  std::size_t column_of(double x) const;
  std::size_t row_of(double y) const;

  std::vector<Triangle> triangles_;
  double cell_size_ = kDefaultGridCell;
  Aabb bounds_;
  std::size_t cols_ = 0;
  std::size_t rows_ = 0;
  std::vector<std::vector<std::uint32_t>> cells_;
};

struct LaneProjection {
  double distance = 0.0;    // perpendicular distance to the closest segment
  double arc_length = 0.0;  // along the centerline, from its first point
  double tangent = 0.0;     // heading of the closest segment
  std::size_t segment = 0;
};

// Directed centerline. A polyline whose last point equals its first is a loop.
struct Lane {
  int id = 0;
  std::vector<Vec2> points;

  bool closed() const { return points.size() > 2 && points.front() == points.back(); }
  double length() const;
  LaneProjection project(Vec2 p) const;
  // Point at arc length s; loops wrap, open lanes extrapolate along the end tangents.
  Vec2 point_at(double s) const;
  // Heading of the segment containing arc length s (same wrapping rules as point_at).
  double tangent_at(double s) const;

  friend bool operator==(const Lane&, const Lane&) = default;
};

struct StopLine {
  OrientedRect rect;
  std::string control;

  friend bool operator==(const StopLine&, const StopLine&) = default;
};

struct MapBundle {
  std::string name;
  DrivableMesh mesh;
  std::vector<Lane> lanes;
  std::vector<StopLine> stop_lines;
  // Controls the map ships with; scenarios may override them by id.
  std::vector<TrafficControl> controls;

  const StopLine* find_stop_line(std::string_view control) const;

  friend bool operator==(const MapBundle&, const MapBundle&) = default;
};

MapBundle parse_map(std::string_view json_text, double cell_size = kDefaultGridCell);
MapBundle load_map(const std::filesystem::path& path, double cell_size = kDefaultGridCell);
std::string serialize_map(const MapBundle& map);

bool point_on_drivable(const MapBundle& map, Vec2 p);

struct LaneHit {
  int lane_id = 0;
  std::size_t lane_index = 0;
  double tangent = 0.0;
  double distance = 0.0;
  double arc_length = 0.0;
};

// Closest lane within `radius`; equal distances resolve to the smaller lane id.
std::optional<LaneHit> nearest_lane_direction(const MapBundle& map, Vec2 p,
                                              double radius = kDefaultLaneRadius);

// Like nearest_lane_direction, restricted to lanes whose local tangent lies within
// pi/2 of `heading`.
std::optional<LaneHit> nearest_aligned_lane(const MapBundle& map, Vec2 p, double heading,
                                            double radius = kDefaultLaneRadius);

}  // namespace drivesim
