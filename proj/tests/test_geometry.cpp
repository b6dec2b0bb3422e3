#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"

#include "rtp/errors.hpp"
#include "rtp/geometry.hpp"

using namespace rtp;

namespace {

PointMatrix matrix(std::initializer_list<std::vector<double>> rows) {
  PointMatrix m(0, rows.begin()->size());
  for (const auto& r : rows) m.append_row(r);
  return m;
}

Hyperplane plane(std::vector<double> n, double u, std::vector<double> x) {
  return Hyperplane{std::move(n), u, std::move(x)};
}

Hyperplane random_plane(std::size_t d, std::mt19937_64& rng, double spread = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, spread);
  Hyperplane h;
  h.normal.resize(d);
  double n2 = 0.0;
  for (double& v : h.normal) {
    v = g(rng);
    n2 += v * v;
  }
  for (double& v : h.normal) v /= std::sqrt(n2);
  h.offset = u(rng);
  for (std::size_t i = 0; i < d; ++i) h.anchor.push_back(g(rng) * 0.3);
  return h;
}

PointMatrix random_points(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  PointMatrix m(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) m(i, j) = g(rng);
  }
  return m;
}

std::vector<int> all_rows(const PointMatrix& m) {
  std::vector<int> idx(m.rows());
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

using V3 = std::array<double, 3>;

V3 sub(V3 a, V3 b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
double dot3(V3 a, V3 b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
V3 cross(V3 a, V3 b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Smallest ball through the given support points (2, 3 or 4 of them).
std::optional<std::pair<V3, double>> circumsphere(const std::vector<V3>& s) {
  if (s.size() == 2) {
    V3 c{(s[0][0] + s[1][0]) / 2, (s[0][1] + s[1][1]) / 2, (s[0][2] + s[1][2]) / 2};
    return std::make_pair(c, std::sqrt(dot3(sub(s[0], c), sub(s[0], c))));
  }
  if (s.size() == 3) {
    const V3 a = sub(s[1], s[0]);
    const V3 b = sub(s[2], s[0]);
    const V3 axb = cross(a, b);
    const double den = 2.0 * dot3(axb, axb);
    if (den < 1e-18) return std::nullopt;
    const V3 t1 = cross(axb, a);
    const V3 t2 = cross(b, axb);
    const double aa = dot3(a, a);
    const double bb = dot3(b, b);
    V3 off{(bb * t1[0] + aa * t2[0]) / den, (bb * t1[1] + aa * t2[1]) / den,
           (bb * t1[2] + aa * t2[2]) / den};
    V3 c{s[0][0] + off[0], s[0][1] + off[1], s[0][2] + off[2]};
    return std::make_pair(c, std::sqrt(dot3(off, off)));
  }
  // 4 points: solve 2 (p_i - p_0) . c = |p_i|^2 - |p_0|^2
  double A[3][3];
  double rhs[3];
  for (int i = 0; i < 3; ++i) {
    const V3 d = sub(s[static_cast<std::size_t>(i) + 1], s[0]);
    for (int j = 0; j < 3; ++j) A[i][j] = 2.0 * d[static_cast<std::size_t>(j)];
    rhs[i] = dot3(s[static_cast<std::size_t>(i) + 1], s[static_cast<std::size_t>(i) + 1]) -
             dot3(s[0], s[0]);
  }
  const double det = A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) -
                     A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
                     A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
  if (std::abs(det) < 1e-12) return std::nullopt;
  V3 c{};
  for (int k = 0; k < 3; ++k) {
    double M[3][3];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) M[i][j] = j == k ? rhs[i] : A[i][j];
    }
    c[static_cast<std::size_t>(k)] =
        (M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
         M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
         M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0])) / det;
  }
  return std::make_pair(c, std::sqrt(dot3(sub(s[0], c), sub(s[0], c))));
}

double exact_min_radius(const std::vector<V3>& pts) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = pts.size();
  auto try_support = [&](const std::vector<V3>& s) {
    const auto ball = circumsphere(s);
    if (!ball || ball->second >= best) return;
    for (const V3& p : pts) {
      if (std::sqrt(dot3(sub(p, ball->first), sub(p, ball->first))) > ball->second + 1e-9) return;
    }
    best = ball->second;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      try_support({pts[i], pts[j]});
      for (std::size_t k = j + 1; k < n; ++k) {
        try_support({pts[i], pts[j], pts[k]});
        for (std::size_t l = k + 1; l < n; ++l) try_support({pts[i], pts[j], pts[k], pts[l]});
      }
    }
  return best;
}

// Exact half-plane intersection by brute force: kept vertices plus edge
// crossings, then a monotone-chain hull.
std::vector<Vec2> brute_clip(const ConvexPolygon2D& poly, const Hyperplane& h, Side side) {
  std::vector<Vec2> cand;
  const double sign = side == Side::kPlus ? 1.0 : -1.0;
  auto s = [&](Vec2 p) { return sign * h.signed_distance(std::vector<double>{p.x, p.y}); };
  const auto& v = poly.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 a = v[i];
    const Vec2 b = v[(i + 1) % v.size()];
    const double sa = s(a);
    const double sb = s(b);
    if (sa >= 0) cand.push_back(a);
    if ((sa > 0 && sb < 0) || (sa < 0 && sb > 0)) {
      const double t = sa / (sa - sb);
      cand.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  std::sort(cand.begin(), cand.end(), [](Vec2 a, Vec2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  auto cr = [](Vec2 o, Vec2 a, Vec2 b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  std::vector<Vec2> hull(2 * cand.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    while (k >= 2 && cr(hull[k - 2], hull[k - 1], cand[i]) <= 1e-15) --k;
    hull[k++] = cand[i];
  }
  for (std::size_t i = cand.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cr(hull[k - 2], hull[k - 1], cand[i]) <= 1e-15) --k;
    hull[k++] = cand[i];
  }
  hull.resize(k > 0 ? k - 1 : 0);
  return hull;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

double boundary_distance(Vec2 p, const std::vector<Vec2>& poly) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
  }
  return best;
}

double hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  double h = 0.0;
  for (Vec2 p : a) h = std::max(h, boundary_distance(p, b));
  for (Vec2 p : b) h = std::max(h, boundary_distance(p, a));
  return h;
}

ConvexPolygon2D random_convex_polygon(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> rad(0.5, 1.5);
  std::vector<double> a(8);
  for (double& x : a) x = ang(rng);
  std::sort(a.begin(), a.end());
  const double r = rad(rng);
  ConvexPolygon2D p;
  for (double t : a) p.vertices.push_back({r * std::cos(t), r * std::sin(t)});
  return p;
}

}  // namespace

TEST_CASE("signed distances on hand-computed planes") {
  const auto origin = matrix({{0, 0}});
  CHECK(signed_distances(origin, plane({1, 0}, 0, {0, 0}))[0] == doctest::Approx(0.0));
  const auto pts = matrix({{2, 0}, {-2, 0}});
  const auto s = signed_distances(pts, plane({1, 0}, 1, {0, 0}));
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK(s[1] == doctest::Approx(-3.0));
}

TEST_CASE("signed distances match a direct dot-product recomputation") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 1 + trial % 7;
    const auto pts = random_points(20, d, rng);
    const auto h = random_plane(d, rng);
    const auto s = signed_distances(pts, h);
    for (std::size_t i = 0; i < pts.rows(); ++i) {
      double ref = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        ref += h.normal[j] * (pts(i, j) - (h.anchor[j] + h.offset * h.normal[j]));
      }
      CHECK(std::abs(s[i] - ref) < 1e-12);
    }
  }
}

TEST_CASE("signed distances reject a dimension mismatch") {
  const auto pts = matrix({{1, 2, 3}});
  CHECK_THROWS_AS(signed_distances(pts, plane({1, 0}, 0, {0, 0})), DataError);
}

TEST_CASE("re-anchoring the same plane keeps distances") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pts = random_points(15, 4, rng);
    const auto h = random_plane(4, rng);
    Hyperplane g = h;
    const double shift = 0.7;
    g.offset = h.offset + shift;
    for (std::size_t j = 0; j < 4; ++j) g.anchor[j] = h.anchor[j] - shift * h.normal[j];
    const auto a = signed_distances(pts, h);
    const auto b = signed_distances(pts, g);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-9);
  }
}

TEST_CASE("hull cut test on hand examples") {
  const auto pts = matrix({{0, 0}, {2, 0}});
  CHECK(hyperplane_cuts_hull(pts, plane({1, 0}, 1, {0, 0})));
  CHECK_FALSE(hyperplane_cuts_hull(pts, plane({0, 1}, 1, {0, 0})));
  // a point exactly on the plane does not count as separated
  CHECK_FALSE(hyperplane_cuts_hull(pts, plane({1, 0}, 0, {0, 0})));
}

TEST_CASE("hull cut test agrees with an exhaustive sign scan in 5D") {
  std::mt19937_64 rng(17);
  int cuts = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = random_points(12, 5, rng);
    const auto h = random_plane(5, rng, 2.0);
    const auto s = signed_distances(pts, h);
    bool oracle = false;
    for (double a : s)
      for (double b : s) oracle = oracle || (a < -kCutTolerance && b > kCutTolerance);
    CHECK(hyperplane_cuts_hull(pts, h) == oracle);
    cuts += oracle;
  }
  CHECK(cuts > 10);
  CHECK(cuts < 100);
}

TEST_CASE("a cutting plane partitions the points into two nonempty parts") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = random_points(10, 3, rng);
    const auto h = random_plane(3, rng);
    if (!hyperplane_cuts_hull(pts, h)) continue;
    std::size_t minus = 0, plus = 0;
    for (double s : signed_distances(pts, h)) (s < 0 ? minus : plus)++;
    CHECK(minus > 0);
    CHECK(plus > 0);
    CHECK(minus + plus == pts.rows());
  }
}

TEST_CASE("enclosing ball of a singleton and an antipodal pair") {
  const auto one = enclosing_ball(matrix({{0, 0}}));
  CHECK(one.radius == 0.0);
  CHECK(one.center == std::vector<double>{0, 0});
  const auto two = enclosing_ball(matrix({{-1, 0}, {1, 0}}));
  CHECK(two.radius == doctest::Approx(1.0));
  CHECK(two.center[0] == doctest::Approx(0.0));
  CHECK(two.center[1] == doctest::Approx(0.0));
}

TEST_CASE("enclosing ball of an empty set throws") {
  const PointMatrix pts(3, 2);
  CHECK_THROWS_AS(enclosing_ball(pts, std::vector<int>{}), DataError);
}

TEST_CASE("enclosing ball contains the points and is within twice the minimal radius") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + trial % 8;
    const auto pts = random_points(n, 3, rng);
    const auto ball = enclosing_ball(pts);
    std::vector<V3> v;
    for (std::size_t i = 0; i < n; ++i) {
      v.push_back({pts(i, 0), pts(i, 1), pts(i, 2)});
      CHECK(std::sqrt(squared_distance(pts.row(i), ball.center)) <= ball.radius + 1e-9);
    }
    const double exact = exact_min_radius(v);
    CHECK(ball.radius >= exact - 1e-9);
    CHECK(ball.radius <= 2.0 * exact + 1e-9);
  }
}

TEST_CASE("enclosing ball equals the farthest-pair reference construction") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = trial < 20 ? 3 : 12;
    const auto pts = random_points(60, d, rng);
    const auto idx = all_rows(pts);
    double best = -1;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < pts.rows(); ++i)
      for (std::size_t j = i + 1; j < pts.rows(); ++j) {
        const double s = squared_distance(pts.row(i), pts.row(j));
        if (s > best) best = s, bi = i, bj = j;
      }
    std::vector<double> c(d);
    for (std::size_t k = 0; k < d; ++k) c[k] = (pts(bi, k) + pts(bj, k)) / 2;
    double r = 0;
    for (std::size_t i = 0; i < pts.rows(); ++i) r = std::max(r, std::sqrt(squared_distance(pts.row(i), c)));
    const DistanceCache cache(pts);
    for (const DistanceCache* cp : {static_cast<const DistanceCache*>(nullptr), &cache}) {
      const auto ball = enclosing_ball(pts, idx, cp);
      CHECK(ball.radius <= 1.01 * r);
      CHECK(ball.radius >= r / 1.01);
    }
  }
}

TEST_CASE("enclosing ball is translation equivariant") {
  std::mt19937_64 rng(41);
  const auto pts = random_points(30, 4, rng);
  PointMatrix moved = pts;
  const std::vector<double> t{3.0, -2.0, 0.5, 10.0};
  for (std::size_t i = 0; i < moved.rows(); ++i)
    for (std::size_t j = 0; j < 4; ++j) moved(i, j) += t[j];
  const auto a = enclosing_ball(pts);
  const auto b = enclosing_ball(moved);
  CHECK(std::abs(a.radius - b.radius) < 1e-9);
  for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(a.center[j] + t[j] - b.center[j]) < 1e-9);
}

TEST_CASE("clip a unit square by axis planes") {
  const auto sq = make_rectangle(0, 0, 1, 1);
  const auto right = clip_polygon(sq, plane({1, 0}, 0.5, {0, 0}), Side::kPlus);
  REQUIRE(right.has_value());
  CHECK(polygon_area(*right) == doctest::Approx(0.5));
  for (const Vec2& v : right->vertices) CHECK(v.x >= 0.5 - 1e-12);
  const auto whole = clip_polygon(sq, plane({1, 0}, 2, {0, 0}), Side::kMinus);
  REQUIRE(whole.has_value());
  CHECK(polygon_area(*whole) == doctest::Approx(1.0));
  CHECK(whole->vertices.size() == 4);
  CHECK_FALSE(clip_polygon(sq, plane({1, 0}, 2, {0, 0}), Side::kPlus).has_value());
}

TEST_CASE("clip areas add up and match a brute-force half-plane hull") {
  std::mt19937_64 rng(43);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto poly = random_convex_polygon(rng);
    const auto h = random_plane(2, rng, 0.8);
    const auto minus = clip_polygon(poly, h, Side::kMinus);
    const auto plus = clip_polygon(poly, h, Side::kPlus);
    const double total = (minus ? polygon_area(*minus) : 0.0) + (plus ? polygon_area(*plus) : 0.0);
    CHECK(std::abs(total - polygon_area(poly)) < 1e-9);
    for (const auto& part : {minus, plus}) {
      if (!part) continue;
      const auto& v = part->vertices;
      REQUIRE(v.size() >= 3);
      for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2 a = v[i], b = v[(i + 1) % v.size()], c = v[(i + 2) % v.size()];
        CHECK((b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x) >= -1e-9);
      }
    }
    if (minus) {
      CHECK(hausdorff(minus->vertices, brute_clip(poly, h, Side::kMinus)) < 1e-6);
      ++checked;
    }
    if (plus) CHECK(hausdorff(plus->vertices, brute_clip(poly, h, Side::kPlus)) < 1e-6);
  }
  CHECK(checked > 50);
}

TEST_CASE("clip agrees with point-membership rasterization") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 10; ++trial) {
    const auto poly = random_convex_polygon(rng);
    const auto h = random_plane(2, rng, 0.5);
    const auto part = clip_polygon(poly, h, Side::kPlus);
    if (!part) continue;
    const int N = 400;
    const double cell = 3.2 / N;
    int inside = 0;
    int mismatched = 0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        const Vec2 p{-1.6 + (i + 0.5) * cell, -1.6 + (j + 0.5) * cell};
        const bool member = polygon_contains(poly, p) &&
                            h.signed_distance(std::vector<double>{p.x, p.y}) >= 0.0;
        const bool clipped = polygon_contains(*part, p);
        inside += member;
        mismatched += member != clipped;
      }
    CHECK(std::abs(inside * cell * cell - polygon_area(*part)) < 0.05);
    // disagreements only along the boundary band
    CHECK(mismatched < 4 * N);
  }
}

TEST_CASE("minimal enclosing circle matches brute force") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec2> pts(3 + trial % 6);
    for (auto& p : pts) p = {u(rng), u(rng)};
    const auto mec = minimal_enclosing_circle(pts);
    std::vector<V3> v;
    for (const auto& p : pts) {
      v.push_back({p.x, p.y, 0.0});
      CHECK(std::hypot(p.x - mec.center[0], p.y - mec.center[1]) <= mec.radius + 1e-9);
    }
    CHECK(mec.radius == doctest::Approx(exact_min_radius(v)).epsilon(1e-9));
  }
}

TEST_CASE("hyperplane validation") {
  CHECK_NOTHROW(validate(plane({1, 0}, 0, {0, 0})));
  CHECK_THROWS_AS(validate(plane({2, 0}, 0, {0, 0})), DataError);
  CHECK_THROWS_AS(validate(plane({1, 0}, -1, {0, 0})), DataError);
  CHECK_THROWS_AS(validate(plane({1, 0}, 0, {0})), DataError);
}
