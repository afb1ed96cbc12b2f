#include "drivesim/map.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "drivesim/errors.hpp"
#include "json_util.hpp"

namespace drivesim {

namespace {

using detail::json;

constexpr double kLaneTieEps = 1e-9;

}  // namespace

DrivableMesh::DrivableMesh(std::vector<Triangle> triangles, double cell_size)
    : triangles_(std::move(triangles)), cell_size_(cell_size) {
  if (!(cell_size_ > 0.0)) throw ConfigError("grid cell size must be positive");
  if (triangles_.empty()) return;
  constexpr double inf = std::numeric_limits<double>::infinity();
  bounds_ = {{inf, inf}, {-inf, -inf}};
  for (const auto& t : triangles_) {
    for (const Vec2& v : {t.a, t.b, t.c}) {
      bounds_.min.x = std::min(bounds_.min.x, v.x);
      bounds_.min.y = std::min(bounds_.min.y, v.y);
      bounds_.max.x = std::max(bounds_.max.x, v.x);
      bounds_.max.y = std::max(bounds_.max.y, v.y);
    }
  }
  cols_ = static_cast<std::size_t>(std::floor((bounds_.max.x - bounds_.min.x) / cell_size_)) + 1;
  rows_ = static_cast<std::size_t>(std::floor((bounds_.max.y - bounds_.min.y) / cell_size_)) + 1;
  cells_.assign(cols_ * rows_, {});
  for (std::uint32_t i = 0; i < triangles_.size(); ++i) {
    const auto& t = triangles_[i];
    if (t.degenerate()) continue;
    const std::size_t c0 = column_of(std::min({t.a.x, t.b.x, t.c.x}));
    const std::size_t c1 = column_of(std::max({t.a.x, t.b.x, t.c.x}));
    const std::size_t r0 = row_of(std::min({t.a.y, t.b.y, t.c.y}));
    const std::size_t r1 = row_of(std::max({t.a.y, t.b.y, t.c.y}));
    for (std::size_t r = r0; r <= r1; ++r) {
      for (std::size_t c = c0; c <= c1; ++c) cells_[r * cols_ + c].push_back(i);
    }
  }
}

std::size_t DrivableMesh::column_of(double x) const {
  const auto c = static_cast<std::size_t>(std::floor((x - bounds_.min.x) / cell_size_));
  return std::min(c, cols_ - 1);
}

std::size_t DrivableMesh::row_of(double y) const {
  const auto r = static_cast<std::size_t>(std::floor((y - bounds_.min.y) / cell_size_));
  return std::min(r, rows_ - 1);
}

bool DrivableMesh::contains(Vec2 p) const {
  if (cells_.empty() || !bounds_.contains(p)) return false;
  for (const auto i : cell(column_of(p.x), row_of(p.y))) {
    if (point_in_triangle(p, triangles_[i])) return true;
  }
  return false;
}

bool DrivableMesh::contains_brute_force(Vec2 p) const {
  return std::any_of(triangles_.begin(), triangles_.end(),
                     [p](const Triangle& t) { return point_in_triangle(p, t); });
}

double Lane::length() const {
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) total += distance(points[i - 1], points[i]);
  return total;
}

LaneProjection Lane::project(Vec2 p) const {
  LaneProjection best;
  best.distance = std::numeric_limits<double>::infinity();
  double cumulative = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const Vec2 a = points[i - 1];
    const Vec2 b = points[i];
    double t = 0.0;
    const double d = point_segment_distance(p, a, b, &t);
    const double seg_len = distance(a, b);
    if (d < best.distance) {
      best.distance = d;
      best.arc_length = cumulative + t * seg_len;
      best.tangent = std::atan2(b.y - a.y, b.x - a.x);
      best.segment = i - 1;
    }
    cumulative += seg_len;
  }
  return best;
}

Vec2 Lane::point_at(double s) const {
  const double total = length();
  if (closed()) {
    s = std::fmod(s, total);
    if (s < 0.0) s += total;
  }
  if (s <= 0.0) {
    const Vec2 a = points[0];
    const Vec2 b = points[1];
    return a + (s / distance(a, b)) * (b - a);
  }
  double cumulative = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const Vec2 a = points[i - 1];
    const Vec2 b = points[i];
    const double seg_len = distance(a, b);
    if (s <= cumulative + seg_len || i + 1 == points.size()) {
      return a + ((s - cumulative) / seg_len) * (b - a);
    }
    cumulative += seg_len;
  }
  return points.back();
}

double Lane::tangent_at(double s) const {
  const double total = length();
  if (closed()) {
    s = std::fmod(s, total);
    if (s < 0.0) s += total;
  }
  double cumulative = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const Vec2 a = points[i - 1];
    const Vec2 b = points[i];
    const double seg_len = distance(a, b);
    if (s < cumulative + seg_len || i + 1 == points.size()) return std::atan2(b.y - a.y, b.x - a.x);
    cumulative += seg_len;
  }
  return 0.0;
}

const StopLine* MapBundle::find_stop_line(std::string_view control) const {
  for (const auto& s : stop_lines) {
    if (s.control == control) return &s;
  }
  return nullptr;
}

MapBundle parse_map(std::string_view json_text, double cell_size) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw MalformedMap(e.what());
  }
  if (!doc.is_object()) throw MalformedMap("top level must be an object");

  MapBundle map;
  const auto& name = detail::require<MalformedMap>(doc, "name", "map");
  if (!name.is_string()) throw MalformedMap("name must be a string");
  map.name = name.get<std::string>();

  const auto& tris = detail::require<MalformedMap>(doc, "triangles", "map");
  if (!tris.is_array()) throw MalformedMap("triangles must be an array");
  std::vector<Triangle> triangles;
  triangles.reserve(tris.size());
  std::size_t nondegenerate = 0;
  for (std::size_t i = 0; i < tris.size(); ++i) {
    const auto& t = tris[i];
    const std::string what = "triangles[" + std::to_string(i) + "]";
    if (!t.is_array() || t.size() != 3) throw MalformedMap(what + " must hold 3 points");
    Triangle tri{detail::point2<MalformedMap>(t[0], what), detail::point2<MalformedMap>(t[1], what),
                 detail::point2<MalformedMap>(t[2], what)};
    if (!tri.degenerate()) ++nondegenerate;
    triangles.push_back(tri);
  }
  if (nondegenerate == 0) throw EmptyMesh();
  map.mesh = DrivableMesh(std::move(triangles), cell_size);

  const auto& lanes = detail::require<MalformedMap>(doc, "lanes", "map");
  if (!lanes.is_array()) throw MalformedMap("lanes must be an array");
  std::set<int> ids;
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    const std::string what = "lanes[" + std::to_string(i) + "]";
    const auto& l = lanes[i];
    const auto& id = detail::require<MalformedMap>(l, "id", what);
    if (!id.is_number_integer()) throw MalformedMap(what + ".id must be an integer");
    Lane lane;
    lane.id = id.get<int>();
    if (!ids.insert(lane.id).second) throw MalformedMap("duplicate lane id " + std::to_string(lane.id));
    const auto& pts = detail::require<MalformedMap>(l, "points", what);
    if (!pts.is_array() || pts.size() < 2) throw MalformedMap(what + " needs at least 2 points");
    for (const auto& p : pts) lane.points.push_back(detail::point2<MalformedMap>(p, what));
    for (std::size_t k = 1; k < lane.points.size(); ++k) {
      if (lane.points[k] == lane.points[k - 1]) {
        throw MalformedMap(what + " has repeated consecutive points");
      }
    }
    map.lanes.push_back(std::move(lane));
  }

  if (doc.contains("stop_lines")) {
    const auto& stops = doc.at("stop_lines");
    if (!stops.is_array()) throw MalformedMap("stop_lines must be an array");
    for (std::size_t i = 0; i < stops.size(); ++i) {
      const std::string what = "stop_lines[" + std::to_string(i) + "]";
      const auto& control = detail::require<MalformedMap>(stops[i], "control", what);
      if (!control.is_string()) throw MalformedMap(what + ".control must be a string");
      map.stop_lines.push_back(
          {detail::rect_from<MalformedMap>(stops[i], what), control.get<std::string>()});
    }
  }

  if (doc.contains("controls")) {
    for (std::size_t i = 0; i < doc.at("controls").size(); ++i) {
      const std::string what = "controls[" + std::to_string(i) + "]";
      bool has_rect = false;
      auto c = detail::control_from<MalformedMap>(doc.at("controls")[i], what, &has_rect);
      if (!has_rect) {
        const StopLine* s = map.find_stop_line(c.id);
        if (s == nullptr) throw MalformedMap(what + " has no rect and no matching stop line");
        c.rect = s->rect;
      }
      try {
        validate_control(c);
      } catch (const ConfigError& e) {
        throw MalformedMap(e.what());
      }
      map.controls.push_back(std::move(c));
    }
  }
  return map;
}

MapBundle load_map(const std::filesystem::path& path, double cell_size) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedMap("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_map(buf.str(), cell_size);
}

std::string serialize_map(const MapBundle& map) {
  json tris = json::array();
  for (const auto& t : map.mesh.triangles()) {
    tris.push_back({{t.a.x, t.a.y}, {t.b.x, t.b.y}, {t.c.x, t.c.y}});
  }
  json lanes = json::array();
  for (const auto& l : map.lanes) {
    json pts = json::array();
    for (const auto& p : l.points) pts.push_back({p.x, p.y});
    lanes.push_back({{"id", l.id}, {"points", pts}});
  }
  json stops = json::array();
  for (const auto& s : map.stop_lines) {
    json j = detail::rect_to_json(s.rect);
    j["control"] = s.control;
    stops.push_back(j);
  }
  json doc = {{"name", map.name}, {"triangles", tris}, {"lanes", lanes}, {"stop_lines", stops}};
  if (!map.controls.empty()) {
    json controls = json::array();
    for (const auto& c : map.controls) controls.push_back(detail::control_to_json(c, true));
    doc["controls"] = controls;
  }
  return doc.dump();
}

bool point_on_drivable(const MapBundle& map, Vec2 p) { return map.mesh.contains(p); }

namespace {

template <class Accept>
std::optional<LaneHit> nearest_lane_if(const MapBundle& map, Vec2 p, double radius,
                                       Accept accept) {
  std::optional<LaneHit> best;
  for (std::size_t i = 0; i < map.lanes.size(); ++i) {
    const Lane& lane = map.lanes[i];
    const LaneProjection proj = lane.project(p);
    if (proj.distance > radius || !accept(proj)) continue;
    const bool better =
        !best || proj.distance < best->distance - kLaneTieEps ||
        (std::abs(proj.distance - best->distance) <= kLaneTieEps && lane.id < best->lane_id);
    if (better) best = LaneHit{lane.id, i, proj.tangent, proj.distance, proj.arc_length};
  }
  return best;
}

}  // namespace

std::optional<LaneHit> nearest_lane_direction(const MapBundle& map, Vec2 p, double radius) {
  return nearest_lane_if(map, p, radius, [](const LaneProjection&) { return true; });
}

std::optional<LaneHit> nearest_aligned_lane(const MapBundle& map, Vec2 p, double heading,
                                            double radius) {
  return nearest_lane_if(map, p, radius, [heading](const LaneProjection& proj) {
    return std::abs(angle_diff(proj.tangent, heading)) <= std::numbers::pi / 2.0;
  });
}

}  // namespace drivesim
