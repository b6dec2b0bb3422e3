#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rtp/geometry.hpp"

namespace rtp {

struct SvgStyle {
  double width = 600.0;  // pixels; height follows the domain aspect ratio
  double stroke_width = 1.0;
};

// One "#rrggbb" fill per cell, drawn from a stream of `seed`.
std::vector<std::string> cell_colors(std::size_t count, std::uint64_t seed);

// Filled cells with black boundaries, scaled to the bounding box of `domain`.
void write_svg(std::ostream& out, const ConvexPolygon2D& domain,
               std::span<const ConvexPolygon2D> cells, std::uint64_t color_seed,
               const SvgStyle& style = {});

// Rows of cell,vertex,x,y with 17 significant digits.
void write_polygon_csv(std::ostream& out, std::span<const ConvexPolygon2D> cells);

}  // namespace rtp
