#include "rtp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rtp/errors.hpp"

namespace rtp {

PointMatrix::PointMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw DataError(DataErrorKind::kDimensionMismatch,
                    "point matrix: value count does not match shape");
  }
}

void PointMatrix::append_row(std::span<const double> r) {
  if (rows_ == 0 && cols_ == 0) cols_ = r.size();
  if (r.size() != cols_) {
    throw DataError(DataErrorKind::kDimensionMismatch,
                    "point matrix: row has " + std::to_string(r.size()) +
                        " columns, expected " + std::to_string(cols_));
  }
  values_.insert(values_.end(), r.begin(), r.end());
  ++rows_;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

double Hyperplane::level() const { return dot(normal, anchor) + offset; }

double Hyperplane::signed_distance(std::span<const double> p) const {
  if (p.size() != normal.size()) {
    throw DataError(DataErrorKind::kDimensionMismatch,
                    "signed distance: point dimension " +
                        std::to_string(p.size()) + " != plane dimension " +
                        std::to_string(normal.size()));
  }
  return dot(normal, p) - level();
}

void validate(const Hyperplane& h) {
  if (h.normal.empty() || h.anchor.size() != h.normal.size()) {
    throw DataError(DataErrorKind::kDimensionMismatch,
                    "hyperplane: anchor and normal dimensions differ");
  }
  if (std::abs(std::sqrt(dot(h.normal, h.normal)) - 1.0) > 1e-9) {
    throw DataError(DataErrorKind::kOther, "hyperplane: normal is not unit");
  }
  if (!(h.offset >= 0.0)) {
    throw DataError(DataErrorKind::kOther, "hyperplane: negative offset");
  }
}

namespace {

void check_dimension(const PointMatrix& points, const Hyperplane& h) {
  if (points.cols() != h.dimension()) {
    throw DataError(DataErrorKind::kDimensionMismatch,
                    "points have dimension " + std::to_string(points.cols()) +
                        ", hyperplane has " + std::to_string(h.dimension()));
  }
}

}  // namespace

std::vector<double> signed_distances(const PointMatrix& points,
                                     const Hyperplane& h) {
  check_dimension(points, h);
  const double level = h.level();
  std::vector<double> out(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) {
    out[i] = dot(h.normal, points.row(i)) - level;
  }
  return out;
}

std::vector<double> signed_distances(const PointMatrix& points,
                                     std::span<const int> indices,
                                     const Hyperplane& h) {
  check_dimension(points, h);
  const double level = h.level();
  std::vector<double> out(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out[i] = dot(h.normal, points.row(static_cast<std::size_t>(indices[i]))) -
             level;
  }
  return out;
}

bool hyperplane_cuts_hull(const PointMatrix& points,
                          std::span<const int> indices, const Hyperplane& h) {
  check_dimension(points, h);
  const double level = h.level();
  bool below = false;
  bool above = false;
  for (int idx : indices) {
    const double s =
        dot(h.normal, points.row(static_cast<std::size_t>(idx))) - level;
    below = below || s < -kCutTolerance;
    above = above || s > kCutTolerance;
    if (below && above) return true;
  }
  return false;
}

bool hyperplane_cuts_hull(const PointMatrix& points, const Hyperplane& h) {
  std::vector<int> all(points.rows());
  std::iota(all.begin(), all.end(), 0);
  return hyperplane_cuts_hull(points, all, h);
}

DistanceCache::DistanceCache(const PointMatrix& points)
    : n_(points.rows()), dist_(n_ * n_, 0.0) {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double d = std::sqrt(squared_distance(points.row(i), points.row(j)));
      dist_[i * n_ + j] = d;
      dist_[j * n_ + i] = d;
    }
  }
}

Ball enclosing_ball(const PointMatrix& points, std::span<const int> indices,
                    const DistanceCache* cache) {
  if (indices.empty()) {
    throw DataError(DataErrorKind::kEmptyInput,
                    "enclosing ball of an empty point set");
  }
  const std::size_t d = points.cols();
  const std::size_t m = indices.size();
  auto pt = [&](std::size_t k) {
    return points.row(static_cast<std::size_t>(indices[k]));
  };

  Ball ball;
  if (m == 1) {
    ball.center.assign(pt(0).begin(), pt(0).end());
    return ball;
  }

  std::vector<double> centroid(d, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const auto p = pt(k);
    for (std::size_t j = 0; j < d; ++j) centroid[j] += p[j];
  }
  for (double& c : centroid) c /= static_cast<double>(m);

  std::vector<double> spread(m);
  for (std::size_t k = 0; k < m; ++k) {
    spread[k] = std::sqrt(squared_distance(pt(k), centroid));
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return spread[a] > spread[b] || (spread[a] == spread[b] && a < b);
  });

  // |p - q| <= |p - c| + |q - c| bounds every pair from above.
  double best = -1.0;
  std::size_t best_a = 0;
  std::size_t best_b = 0;
  for (std::size_t a = 0; a < m; ++a) {
    const std::size_t ia = order[a];
    if (2.0 * spread[ia] < best) break;
    for (std::size_t b = a + 1; b < m; ++b) {
      const std::size_t ib = order[b];
      if (spread[ia] + spread[ib] < best) break;
      const double dist =
          cache ? (*cache)(indices[ia], indices[ib])
                : std::sqrt(squared_distance(pt(ia), pt(ib)));
      if (dist > best) {
        best = dist;
        best_a = ia;
        best_b = ib;
      }
    }
  }

  ball.center.resize(d);
  const auto p = pt(best_a);
  const auto q = pt(best_b);
  for (std::size_t j = 0; j < d; ++j) ball.center[j] = 0.5 * (p[j] + q[j]);
  double r2 = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    r2 = std::max(r2, squared_distance(pt(k), ball.center));
  }
  ball.radius = std::max(std::sqrt(r2), 0.5 * best);
  return ball;
}

Ball enclosing_ball(const PointMatrix& points) {
  std::vector<int> all(points.rows());
  std::iota(all.begin(), all.end(), 0);
  return enclosing_ball(points, all);
}

// --- 2D --------------------------------------------------------------------

ConvexPolygon2D make_rectangle(double x0, double y0, double x1, double y1) {
  return ConvexPolygon2D{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

double polygon_area(const ConvexPolygon2D& poly) {
  const auto& v = poly.vertices;
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % v.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * a;
}

double polygon_perimeter(const ConvexPolygon2D& poly) {
  const auto& v = poly.vertices;
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % v.size()];
    s += std::hypot(q.x - p.x, q.y - p.y);
  }
  return s;
}

bool polygon_contains(const ConvexPolygon2D& poly, Vec2 p, double eps) {
  const auto& v = poly.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % v.size()];
    const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    if (cross < -eps) return false;
  }
  return true;
}

namespace {

void check_planar(const Hyperplane& h) {
  if (h.dimension() != 2) {
    throw DataError(DataErrorKind::kDimensionMismatch,
                    "polygon operations need a 2D hyperplane");
  }
}

double planar_distance(const Hyperplane& h, double level, Vec2 p) {
  return h.normal[0] * p.x + h.normal[1] * p.y - level;
}

}  // namespace

std::optional<ConvexPolygon2D> clip_polygon(const ConvexPolygon2D& poly,
                                            const Hyperplane& h, Side side) {
  check_planar(h);
  const double level = h.level();
  const double sign = side == Side::kPlus ? 1.0 : -1.0;
  const auto& v = poly.vertices;
  ConvexPolygon2D out;
  out.vertices.reserve(v.size() + 1);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 a = v[i];
    const Vec2 b = v[(i + 1) % v.size()];
    const double sa = sign * planar_distance(h, level, a);
    const double sb = sign * planar_distance(h, level, b);
    if (sa >= 0.0) out.vertices.push_back(a);
    if ((sa >= 0.0) != (sb >= 0.0)) {
      const double t = sa / (sa - sb);
      out.vertices.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  // Drop coincident neighbours left behind by vertices lying on the line.
  std::vector<Vec2> clean;
  for (const Vec2& p : out.vertices) {
    if (clean.empty() || std::hypot(p.x - clean.back().x, p.y - clean.back().y) > 1e-15) {
      clean.push_back(p);
    }
  }
  while (clean.size() > 1 && std::hypot(clean.front().x - clean.back().x,
                                        clean.front().y - clean.back().y) <= 1e-15) {
    clean.pop_back();
  }
  out.vertices = std::move(clean);
  if (out.vertices.size() < 3) return std::nullopt;
  const double area = polygon_area(out);
  if (!(area > 1e-14 * std::abs(polygon_area(poly)))) return std::nullopt;
  return out;
}

bool hyperplane_cuts_polygon(const ConvexPolygon2D& poly, const Hyperplane& h) {
  check_planar(h);
  const double level = h.level();
  bool below = false;
  bool above = false;
  for (const Vec2& p : poly.vertices) {
    const double s = planar_distance(h, level, p);
    below = below || s < -kCutTolerance;
    above = above || s > kCutTolerance;
  }
  return below && above;
}

namespace {

struct Circle {
  Vec2 c;
  double r = 0.0;
};

bool inside(const Circle& circle, Vec2 p) {
  return std::hypot(p.x - circle.c.x, p.y - circle.c.y) <=
         circle.r * (1.0 + 1e-12) + 1e-15;
}

Circle from_two(Vec2 a, Vec2 b) {
  const Vec2 c{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
  return {c, 0.5 * std::hypot(a.x - b.x, a.y - b.y)};
}

Circle from_three(Vec2 a, Vec2 b, Vec2 c) {
  const double bx = b.x - a.x;
  const double by = b.y - a.y;
  const double cx = c.x - a.x;
  const double cy = c.y - a.y;
  const double det = 2.0 * (bx * cy - by * cx);
  if (std::abs(det) < 1e-300) {
    // Collinear: the circle on the farthest pair.
    Circle best = from_two(a, b);
    for (const Circle& cand : {from_two(a, c), from_two(b, c)}) {
      if (cand.r > best.r) best = cand;
    }
    return best;
  }
  const double b2 = bx * bx + by * by;
  const double c2 = cx * cx + cy * cy;
  const Vec2 center{a.x + (cy * b2 - by * c2) / det,
                    a.y + (bx * c2 - cx * b2) / det};
  return {center, std::hypot(a.x - center.x, a.y - center.y)};
}

}  // namespace

Ball minimal_enclosing_circle(std::span<const Vec2> pts) {
  if (pts.empty()) {
    throw DataError(DataErrorKind::kEmptyInput,
                    "enclosing circle of an empty point set");
  }
  Circle c{pts[0], 0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (inside(c, pts[i])) continue;
    c = {pts[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (inside(c, pts[j])) continue;
      c = from_two(pts[i], pts[j]);
      for (std::size_t k = 0; k < j; ++k) {
        if (inside(c, pts[k])) continue;
        c = from_three(pts[i], pts[j], pts[k]);
      }
    }
  }
  return Ball{{c.c.x, c.c.y}, c.r};
}

}  // namespace rtp
