#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "drivesim/world.hpp"

namespace drivesim {

using Rgb = std::array<std::uint8_t, 3>;

struct ColorMap {
  Rgb background{0, 0, 0};
  Rgb drivable{90, 90, 90};
  Rgb ego{220, 30, 30};
  Rgb vehicle_npc{40, 90, 230};
  Rgb waypoint{30, 200, 60};
  Rgb light_red{255, 0, 128};
  Rgb light_yellow{255, 210, 0};
  Rgb light_green{0, 255, 160};
  Rgb lane_left{200, 200, 120};
  Rgb lane_right{240, 240, 240};
  Rgb lane_overlap{170, 120, 220};

  friend bool operator==(const ColorMap&, const ColorMap&) = default;
};

struct BirdviewFrame {
  int width = 0;
  int height = 0;
  double meters_per_pixel = 0.0;
  Pose2 camera;
  std::vector<std::uint8_t> pixels;  // row-major RGB, row 0 at the top

  BirdviewFrame() = default;
  BirdviewFrame(int w, int h, double mpp, const Pose2& cam)
      : width(w), height(h), meters_per_pixel(mpp), camera(cam),
        pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3, 0) {}

  Rgb pixel(int col, int row) const;
  void set_pixel(int col, int row, const Rgb& c);
  void fill(const Rgb& c);
  std::size_t count_pixels(const Rgb& c) const;

  friend bool operator==(const BirdviewFrame&, const BirdviewFrame&) = default;
};

enum class RenderBackend { Cpu, Dummy };

// Accepts "cpu" and "dummy"; any other name throws BackendUnavailable.
RenderBackend render_backend_from_name(std::string_view name);

struct RenderConfig {
  int width = 64;
  int height = 64;
  double meters_per_pixel = 0.6;
  // Camera row as a fraction of the frame height, measured from the top.
  double camera_row_fraction = 0.75;
  double waypoint_radius = 2.0;
  ColorMap colors;
  RenderBackend backend = RenderBackend::Cpu;
};

// Maps world points to continuous pixel coordinates (x right, y down). The camera
// heading points up the screen.
class CameraTransform {
 public:
  CameraTransform(const Pose2& camera, const RenderConfig& cfg);
  Vec2 to_pixel(Vec2 world) const;
  Vec2 relative(Vec2 world) const;
  Vec2 relative_to_pixel(Vec2 rel) const;

 private:
  Pose2 camera_;
  double cos_;
  double sin_;
  double inv_scale_;
  double origin_col_;
  double origin_row_;
};

// Renders the world as seen from `camera`. `waypoint` is the next target, if any.
BirdviewFrame render(const WorldState& w, const Pose2& camera, const RenderConfig& cfg,
                     std::optional<Vec2> waypoint = std::nullopt);

// Ego-centric render; falls back to the map center looking along +y without an ego.
BirdviewFrame render_birdview(const WorldState& w, const RenderConfig& cfg,
                              std::optional<Vec2> waypoint = std::nullopt);

// Fills pixels whose centers lie in the closed triangle (pixel coordinates). Shared edges
// follow a top-left rule so a triangulated region is covered exactly once.
void rasterize_triangle(BirdviewFrame& frame, Vec2 a, Vec2 b, Vec2 c, const Rgb& color);

// Same as rasterize_triangle but reports covered pixels instead of painting them.
template <class Visit>
void for_each_covered_pixel(int width, int height, Vec2 a, Vec2 b, Vec2 c, Visit visit);

void write_ppm(const BirdviewFrame& frame, const std::filesystem::path& path);
BirdviewFrame read_ppm(const std::filesystem::path& path);

}  // namespace drivesim

#include "drivesim/detail/raster.hpp"
