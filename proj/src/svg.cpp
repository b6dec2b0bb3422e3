#include "rtp/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <ostream>

#include "rtp/errors.hpp"
#include "rtp/random.hpp"

namespace rtp {

namespace {

constexpr std::uint64_t kColorStream = 0xC0103;

std::string fmt(double v, int precision) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general,
                               precision);
  return std::string(buf, r.ptr);
}

}  // namespace

std::vector<std::string> cell_colors(std::size_t count, std::uint64_t seed) {
  Rng rng = make_rng(seed, kColorStream);
  std::uniform_int_distribution<int> channel(40, 235);
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    char buf[8];
    const int r = channel(rng);
    const int g = channel(rng);
    const int b = channel(rng);
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    out.emplace_back(buf);
  }
  return out;
}

void write_svg(std::ostream& out, const ConvexPolygon2D& domain,
               std::span<const ConvexPolygon2D> cells, std::uint64_t color_seed,
               const SvgStyle& style) {
  if (domain.vertices.empty()) throw UsageError("svg: empty domain");
  double xmin = domain.vertices[0].x, xmax = xmin;
  double ymin = domain.vertices[0].y, ymax = ymin;
  for (const Vec2& v : domain.vertices) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
    ymin = std::min(ymin, v.y);
    ymax = std::max(ymax, v.y);
  }
  const double span_x = xmax - xmin;
  const double span_y = ymax - ymin;
  if (!(span_x > 0.0) || !(span_y > 0.0)) throw UsageError("svg: degenerate domain");
  const double scale = style.width / span_x;
  const double height = span_y * scale;
  const double pad = style.stroke_width;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << fmt(style.width + 2 * pad, 10) << "\" height=\"" << fmt(height + 2 * pad, 10)
      << "\" viewBox=\"0 0 " << fmt(style.width + 2 * pad, 10) << ' '
      << fmt(height + 2 * pad, 10) << "\">\n";
  const auto colors = cell_colors(cells.size(), color_seed);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    out << "  <polygon points=\"";
    for (std::size_t i = 0; i < cells[c].vertices.size(); ++i) {
      const Vec2& v = cells[c].vertices[i];
      // SVG y axis points down.
      out << (i ? " " : "") << fmt(pad + (v.x - xmin) * scale, 10) << ','
          << fmt(pad + (ymax - v.y) * scale, 10);
    }
    out << "\" fill=\"" << colors[c] << "\" stroke=\"black\" stroke-width=\""
        << fmt(style.stroke_width, 10) << "\" stroke-linejoin=\"round\"/>\n";
  }
  out << "</svg>\n";
}

void write_polygon_csv(std::ostream& out, std::span<const ConvexPolygon2D> cells) {
  out << "cell,vertex,x,y\n";
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t i = 0; i < cells[c].vertices.size(); ++i) {
      const Vec2& v = cells[c].vertices[i];
      out << c << ',' << i << ',' << fmt(v.x, 17) << ',' << fmt(v.y, 17) << '\n';
    }
  }
}

}  // namespace rtp
