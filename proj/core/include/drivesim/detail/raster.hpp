#pragma once

// Fixed-point triangle scan conversion behind rasterize_triangle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

namespace drivesim {

namespace detail {

inline constexpr int kSubpixelBits = 8;
inline constexpr std::int64_t kSubpixel = std::int64_t{1} << kSubpixelBits;
// Keeps edge-function products inside int64.
inline constexpr double kMaxPixelCoord = 1 << 21;

struct FixedPoint {
  std::int64_t x;
  std::int64_t y;
};

inline FixedPoint to_fixed(Vec2 p) {
  const double x = std::clamp(p.x, -kMaxPixelCoord, kMaxPixelCoord);
  const double y = std::clamp(p.y, -kMaxPixelCoord, kMaxPixelCoord);
  return {std::llround(x * static_cast<double>(kSubpixel)),
          std::llround(y * static_cast<double>(kSubpixel))};
}

// Edges owned by the triangle on their positive side when the sample sits exactly on
// them. Reversing the edge flips the answer, so neighbours never both claim a sample.
inline bool owns_edge(FixedPoint from, FixedPoint to) {
  const std::int64_t dx = to.x - from.x;
  const std::int64_t dy = to.y - from.y;
  return dy > 0 || (dy == 0 && dx < 0);
}

inline std::int64_t edge(FixedPoint a, FixedPoint b, std::int64_t px, std::int64_t py) {
  return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace detail

template <class Visit>
void for_each_covered_pixel(int width, int height, Vec2 fa, Vec2 fb, Vec2 fc, Visit visit) {
  using detail::FixedPoint;
  FixedPoint a = detail::to_fixed(fa);
  FixedPoint b = detail::to_fixed(fb);
  FixedPoint c = detail::to_fixed(fc);
  std::int64_t area = detail::edge(a, b, c.x, c.y);
  if (area == 0) return;
  if (area < 0) std::swap(b, c);

  const std::int64_t half = detail::kSubpixel / 2;
  const std::int64_t min_x = std::min({a.x, b.x, c.x});
  const std::int64_t max_x = std::max({a.x, b.x, c.x});
  const std::int64_t min_y = std::min({a.y, b.y, c.y});
  const std::int64_t max_y = std::max({a.y, b.y, c.y});
  // Pixel i has its center at i * S + S / 2.
  const std::int64_t col0 = std::max<std::int64_t>(0, -detail::floor_div(half - min_x, detail::kSubpixel));
  const std::int64_t col1 = std::min<std::int64_t>(width - 1, detail::floor_div(max_x - half, detail::kSubpixel));
  const std::int64_t row0 = std::max<std::int64_t>(0, -detail::floor_div(half - min_y, detail::kSubpixel));
  const std::int64_t row1 = std::min<std::int64_t>(height - 1, detail::floor_div(max_y - half, detail::kSubpixel));
  if (col0 > col1 || row0 > row1) return;

  const bool own_ab = detail::owns_edge(a, b);
  const bool own_bc = detail::owns_edge(b, c);
  const bool own_ca = detail::owns_edge(c, a);
  auto inside = [](std::int64_t e, bool own) { return e > 0 || (e == 0 && own); };

  for (std::int64_t row = row0; row <= row1; ++row) {
    const std::int64_t py = row * detail::kSubpixel + half;
    for (std::int64_t col = col0; col <= col1; ++col) {
      const std::int64_t px = col * detail::kSubpixel + half;
      if (inside(detail::edge(a, b, px, py), own_ab) && inside(detail::edge(b, c, px, py), own_bc) &&
          inside(detail::edge(c, a, px, py), own_ca)) {
        visit(static_cast<int>(col), static_cast<int>(row));
      }
    }
  }
}

}  // namespace drivesim
