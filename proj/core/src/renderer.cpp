#include "drivesim/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

namespace drivesim {

Rgb BirdviewFrame::pixel(int col, int row) const {
  const std::size_t i = (static_cast<std::size_t>(row) * width + col) * 3;
  return {pixels[i], pixels[i + 1], pixels[i + 2]};
}

void BirdviewFrame::set_pixel(int col, int row, const Rgb& c) {
  const std::size_t i = (static_cast<std::size_t>(row) * width + col) * 3;
  pixels[i] = c[0];
  pixels[i + 1] = c[1];
  pixels[i + 2] = c[2];
}

void BirdviewFrame::fill(const Rgb& c) {
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = c[0];
    pixels[i + 1] = c[1];
    pixels[i + 2] = c[2];
  }
}

std::size_t BirdviewFrame::count_pixels(const Rgb& c) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    if (pixels[i] == c[0] && pixels[i + 1] == c[1] && pixels[i + 2] == c[2]) ++n;
  }
  return n;
}

RenderBackend render_backend_from_name(std::string_view name) {
  if (name == "cpu") return RenderBackend::Cpu;
  if (name == "dummy") return RenderBackend::Dummy;
  throw BackendUnavailable(std::string(name));
}

CameraTransform::CameraTransform(const Pose2& camera, const RenderConfig& cfg)
    : camera_(camera),
      cos_(std::cos(camera.psi())),
      sin_(std::sin(camera.psi())),
      inv_scale_(1.0 / cfg.meters_per_pixel),
      origin_col_(0.5 * cfg.width),
      origin_row_(cfg.camera_row_fraction * cfg.height) {}

Vec2 CameraTransform::relative(Vec2 world) const { return {world.x - camera_.x, world.y - camera_.y}; }

Vec2 CameraTransform::to_pixel(Vec2 world) const { return relative_to_pixel(relative(world)); }

Vec2 CameraTransform::relative_to_pixel(Vec2 rel) const {
  const double dx = rel.x;
  const double dy = rel.y;
  const double forward = cos_ * dx + sin_ * dy;
  const double right = sin_ * dx - cos_ * dy;
  return {origin_col_ + right * inv_scale_, origin_row_ - forward * inv_scale_};
}

void rasterize_triangle(BirdviewFrame& frame, Vec2 a, Vec2 b, Vec2 c, const Rgb& color) {
  for_each_covered_pixel(frame.width, frame.height, a, b, c,
                         [&](int col, int row) { frame.set_pixel(col, row, color); });
}

namespace {

void fill_rect(BirdviewFrame& frame, const CameraTransform& cam, const OrientedRect& r,
               const Rgb& color) {
  // Corners are built around the camera-relative center so that translating the world
  // and camera together reproduces the same pixel coordinates.
  const Vec2 rel = cam.relative(r.center.position());
  const auto corners = rect_corners({Pose2(rel.x, rel.y, r.center.psi()), r.length, r.width});
  std::array<Vec2, 4> px;
  for (std::size_t i = 0; i < 4; ++i) px[i] = cam.relative_to_pixel(corners[i]);
  rasterize_triangle(frame, px[0], px[1], px[2], color);
  rasterize_triangle(frame, px[0], px[2], px[3], color);
}

void fill_disc(BirdviewFrame& frame, Vec2 center_px, double radius_px, const Rgb& color) {
  const int col0 = std::max(0, static_cast<int>(std::floor(center_px.x - radius_px)));
  const int col1 = std::min(frame.width - 1, static_cast<int>(std::ceil(center_px.x + radius_px)));
  const int row0 = std::max(0, static_cast<int>(std::floor(center_px.y - radius_px)));
  const int row1 = std::min(frame.height - 1, static_cast<int>(std::ceil(center_px.y + radius_px)));
  const double r2 = radius_px * radius_px;
  for (int row = row0; row <= row1; ++row) {
    for (int col = col0; col <= col1; ++col) {
      const double dx = col + 0.5 - center_px.x;
      const double dy = row + 0.5 - center_px.y;
      if (dx * dx + dy * dy <= r2) frame.set_pixel(col, row, color);
    }
  }
}

// Marks pixels touched by the segment; sampled at quarter-pixel spacing.
void trace_segment(std::vector<std::uint8_t>& mask, int width, int height, Vec2 a, Vec2 b,
                   std::uint8_t bit) {
  const double len = std::max(std::abs(b.x - a.x), std::abs(b.y - a.y));
  const int samples = static_cast<int>(std::ceil(len * 4.0)) + 1;
  for (int k = 0; k <= samples; ++k) {
    const double t = static_cast<double>(k) / samples;
    const double x = a.x + t * (b.x - a.x);
    const double y = a.y + t * (b.y - a.y);
    if (x < 0.0 || y < 0.0 || x >= width || y >= height) continue;
    mask[static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x)] |= bit;
  }
}

bool segment_may_touch(Vec2 a, Vec2 b, int width, int height) {
  return !(std::max(a.x, b.x) < 0.0 || std::min(a.x, b.x) >= width || std::max(a.y, b.y) < 0.0 ||
           std::min(a.y, b.y) >= height);
}

const Rgb* light_color(const ColorMap& colors, LightState s) {
  switch (s) {
    case LightState::Red: return &colors.light_red;
    case LightState::Yellow: return &colors.light_yellow;
    case LightState::Green: return &colors.light_green;
    case LightState::NotApplicable: return nullptr;
  }
  return nullptr;
}

}  // namespace

BirdviewFrame render(const WorldState& w, const Pose2& camera, const RenderConfig& cfg,
                     std::optional<Vec2> waypoint) {
  if (cfg.width <= 0 || cfg.height <= 0 || !(cfg.meters_per_pixel > 0.0)) {
    throw ConfigError("render size and scale must be positive");
  }
  BirdviewFrame frame(cfg.width, cfg.height, cfg.meters_per_pixel, camera);
  if (cfg.backend == RenderBackend::Dummy) return frame;

  const ColorMap& colors = cfg.colors;
  const CameraTransform cam(camera, cfg);
  frame.fill(colors.background);

  if (w.map) {
    for (const auto& t : w.map->mesh.triangles()) {
      rasterize_triangle(frame, cam.to_pixel(t.a), cam.to_pixel(t.b), cam.to_pixel(t.c),
                         colors.drivable);
    }

    // Lanes running with the camera heading use lane_right, against it lane_left.
    constexpr std::uint8_t kWith = 1;
    constexpr std::uint8_t kAgainst = 2;
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(cfg.width) * cfg.height, 0);
    const Vec2 heading = camera.heading();
    for (const auto& lane : w.map->lanes) {
      for (std::size_t i = 1; i < lane.points.size(); ++i) {
        const Vec2 a = cam.to_pixel(lane.points[i - 1]);
        const Vec2 b = cam.to_pixel(lane.points[i]);
        if (!segment_may_touch(a, b, cfg.width, cfg.height)) continue;
        const bool with = dot(lane.points[i] - lane.points[i - 1], heading) >= 0.0;
        trace_segment(mask, cfg.width, cfg.height, a, b, with ? kWith : kAgainst);
      }
    }
    for (int row = 0; row < cfg.height; ++row) {
      for (int col = 0; col < cfg.width; ++col) {
        switch (mask[static_cast<std::size_t>(row) * cfg.width + col]) {
          case kWith: frame.set_pixel(col, row, colors.lane_right); break;
          case kAgainst: frame.set_pixel(col, row, colors.lane_left); break;
          case kWith | kAgainst: frame.set_pixel(col, row, colors.lane_overlap); break;
          default: break;
        }
      }
    }
  }

  for (const auto& c : w.controls) {
    if (c.kind != ControlKind::TrafficLight) continue;
    if (const Rgb* color = light_color(colors, c.state)) fill_rect(frame, cam, c.rect, *color);
  }

  for (const auto& [type, batch] : w.agents) {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (!batch.present[i] || w.is_ego({type, i})) continue;
      fill_rect(frame, cam, footprint(batch.attrs[i], batch.states[i]), colors.vehicle_npc);
    }
  }
  if (w.has_ego && w.is_present({kVehicle, 0})) {
    const AgentBatch& v = w.agents.at(kVehicle);
    fill_rect(frame, cam, footprint(v.attrs[0], v.states[0]), colors.ego);
  }

  if (waypoint) {
    fill_disc(frame, cam.to_pixel(*waypoint), cfg.waypoint_radius / cfg.meters_per_pixel,
              colors.waypoint);
  }
  return frame;
}

BirdviewFrame render_birdview(const WorldState& w, const RenderConfig& cfg,
                              std::optional<Vec2> waypoint) {
  if (w.has_ego && w.is_present({kVehicle, 0})) {
    return render(w, w.agents.at(kVehicle).states[0].pose, cfg, waypoint);
  }
  Pose2 camera(0.0, 0.0, std::numbers::pi / 2.0);
  if (w.map && !w.map->mesh.triangles().empty()) {
    const Aabb& b = w.map->mesh.bounds();
    camera = Pose2(0.5 * (b.min.x + b.max.x), 0.5 * (b.min.y + b.max.y), std::numbers::pi / 2.0);
  }
  return render(w, camera, cfg, waypoint);
}

void write_ppm(const BirdviewFrame& frame, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "P6\n" << frame.width << ' ' << frame.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.pixels.data()),
            static_cast<std::streamsize>(frame.pixels.size()));
  if (!out) throw Error("failed writing " + path.string());
}

BirdviewFrame read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string magic;
  int w = 0;
  int h = 0;
  int maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P6" || w <= 0 || h <= 0 || maxval != 255) {
    throw Error("unsupported PPM header in " + path.string());
  }
  in.get();  // single whitespace after the header
  BirdviewFrame frame(w, h, 0.0, Pose2{});
  in.read(reinterpret_cast<char*>(frame.pixels.data()),
          static_cast<std::streamsize>(frame.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(frame.pixels.size())) {
    throw Error("truncated PPM " + path.string());
  }
  return frame;
}

}  // namespace drivesim
