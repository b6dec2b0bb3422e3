#include <cmath>
#include <string>

#include "rtp/errors.hpp"
#include "rtp/tessellation.hpp"

namespace rtp {

namespace {

struct Cell {
  ConvexPolygon2D polygon;
  Ball circle;
};

Cell make_cell(ConvexPolygon2D polygon) {
  Ball circle = minimal_enclosing_circle(polygon.vertices);
  return {std::move(polygon), std::move(circle)};
}

}  // namespace

PriorDraw2D prior_draw_2d(const ConvexPolygon2D& domain,
                          const RtpMeasure& measure, double budget, Rng& rng,
                          RateMode mode) {
  if (measure.dimension() != 2) {
    throw UsageError("prior draws on polygons need a 2D measure");
  }
  if (!std::isfinite(budget) || budget < 0.0) {
    throw UsageError("prior draws need a finite, nonnegative budget");
  }
  if (domain.vertices.size() < 3 || !(polygon_area(domain) > 0.0)) {
    throw DataError(DataErrorKind::kOther,
                    "domain must be a counterclockwise polygon with area");
  }

  // Proposal mass per unit circle radius.
  const double mass = mode == RateMode::kExact ? measure.direction_mass() : 1.0;

  std::vector<Cell> cells;
  cells.push_back(make_cell(domain));
  PriorDraw2D draw;

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Hyperplane h;
  h.normal.resize(2);
  double clock = 0.0;
  while (true) {
    double total = 0.0;
    for (const Cell& c : cells) total += c.circle.radius;
    if (!(total > 0.0)) break;
    clock += std::exponential_distribution<double>(mass * total)(rng);
    if (clock > budget) break;

    const double target = unit(rng) * total;
    std::size_t pick = cells.size() - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      acc += cells[i].circle.radius;
      if (target < acc) {
        pick = i;
        break;
      }
    }
    const Cell& cell = cells[pick];
    h.anchor = cell.circle.center;

    bool hit = false;
    for (long attempt = 0; attempt < kMaxCutRejections; ++attempt) {
      sample_direction(measure, rng, h.normal);
      h.offset = unit(rng) * cell.circle.radius;
      hit = hyperplane_cuts_polygon(cell.polygon, h);
      if (hit || mode == RateMode::kExact) break;
    }
    if (!hit) {
      if (mode == RateMode::kExact) continue;  // thinned proposal
      throw NumericalError("prior draw: cut sampler exceeded rejection cap");
    }

    auto lower = clip_polygon(cell.polygon, h, Side::kMinus);
    auto upper = clip_polygon(cell.polygon, h, Side::kPlus);
    // A sliver below the area floor is not a real cut.
    if (!lower || !upper) continue;
    cells[pick] = make_cell(std::move(*lower));
    cells.push_back(make_cell(std::move(*upper)));
    draw.cuts.push_back(h);
  }
  draw.cells.reserve(cells.size());
  for (Cell& c : cells) draw.cells.push_back(std::move(c.polygon));
  return draw;
}

}  // namespace rtp
