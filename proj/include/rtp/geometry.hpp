#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace rtp {

// Dense row-major n x d matrix of predictor coordinates.
class PointMatrix {
 public:
  PointMatrix() = default;
  PointMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}
  PointMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) {
    return {values_.data() + i * cols_, cols_};
  }
  double operator()(std::size_t i, std::size_t j) const {
    return values_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return values_[i * cols_ + j];
  }

  void append_row(std::span<const double> r);
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);

// The set { P : <normal, P - (anchor + offset * normal)> = 0 }.
struct Hyperplane {
  std::vector<double> normal;
  double offset = 0.0;
  std::vector<double> anchor;

  std::size_t dimension() const noexcept { return normal.size(); }
  // <normal, anchor> + offset; signed distance is <normal, P> - level().
  double level() const;
  double signed_distance(std::span<const double> p) const;
};

// Throws DataError on a malformed plane (non-unit normal, negative offset,
// anchor/normal size mismatch).
void validate(const Hyperplane& h);

struct Ball {
  std::vector<double> center;
  double radius = 0.0;
};

inline constexpr double kCutTolerance = 1e-12;

std::vector<double> signed_distances(const PointMatrix& points,
                                     const Hyperplane& h);
std::vector<double> signed_distances(const PointMatrix& points,
                                     std::span<const int> indices,
                                     const Hyperplane& h);

// True iff some point lies strictly below -kCutTolerance and another strictly
// above +kCutTolerance, so both children of the cut are nonempty.
bool hyperplane_cuts_hull(const PointMatrix& points,
                          std::span<const int> indices, const Hyperplane& h);
bool hyperplane_cuts_hull(const PointMatrix& points, const Hyperplane& h);

// Optional cache of all pairwise Euclidean distances of a point matrix, used
// to speed up the farthest-pair scan when the dimension is large.
class DistanceCache {
 public:
  explicit DistanceCache(const PointMatrix& points);
  double operator()(int i, int j) const {
    return dist_[static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j)];
  }
  std::size_t size() const noexcept { return n_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> dist_;
};

// Containing ball: center at the midpoint of the farthest pair of points,
// radius grown in one pass to cover everything. The farthest pair is found
// exactly; candidates are visited in decreasing distance from the centroid
// and pairs that cannot beat the current best are skipped.
Ball enclosing_ball(const PointMatrix& points, std::span<const int> indices,
                    const DistanceCache* cache = nullptr);
Ball enclosing_ball(const PointMatrix& points);

// --- 2D exact engine -------------------------------------------------------

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Counterclockwise convex polygon.
struct ConvexPolygon2D {
  std::vector<Vec2> vertices;
};

enum class Side { kMinus, kPlus };

ConvexPolygon2D make_rectangle(double x0, double y0, double x1, double y1);
double polygon_area(const ConvexPolygon2D& poly);
double polygon_perimeter(const ConvexPolygon2D& poly);
bool polygon_contains(const ConvexPolygon2D& poly, Vec2 p, double eps = 0.0);

// poly ∩ h^side, or nullopt when the intersection has empty interior.
std::optional<ConvexPolygon2D> clip_polygon(const ConvexPolygon2D& poly,
                                            const Hyperplane& h, Side side);

// True iff vertices lie strictly on both sides of h.
bool hyperplane_cuts_polygon(const ConvexPolygon2D& poly, const Hyperplane& h);

// Exact smallest enclosing circle of a small 2D point set (incremental
// Welzl without recursion).
Ball minimal_enclosing_circle(std::span<const Vec2> points);

}  // namespace rtp
