#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rtp/geometry.hpp"
#include "rtp/random.hpp"

namespace rtp {

enum class MeasureKind {
  kUniform,          // uRTP: uniform directions on the sphere
  kWeightedUniform,  // wuRTP: normalized N(0, w_i^2) directions
  kMondrian,         // MRTP: the 2d signed coordinate axes
  kWeightedMondrian  // wMRTP: signed axes, axis i weighted by w_i
};

// How a polytope's event rate is computed.
//   kBall  - radius of the enclosing ball (spherical approximation)
//   kExact - exact hyperplane measure; available for the axis-aligned
//            measures in any dimension.
enum class RateMode { kBall, kExact };

std::string_view to_string(MeasureKind kind);
std::string_view to_string(RateMode mode);
MeasureKind parse_measure_kind(std::string_view name);
RateMode parse_rate_mode(std::string_view name);

// Directional part of an RTP measure; the offset part is always Lebesgue on
// [0, inf).
class RtpMeasure {
 public:
  // Unweighted kinds ignore `weights`; weighted kinds require one strictly
  // positive weight per dimension.
  RtpMeasure(MeasureKind kind, std::size_t dimension,
             std::vector<double> weights = {});

  MeasureKind kind() const noexcept { return kind_; }
  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  bool axis_aligned() const noexcept {
    return kind_ == MeasureKind::kMondrian ||
           kind_ == MeasureKind::kWeightedMondrian;
  }
  // Total mass of the directional measure: 1 for the uniform kinds, 2d for
  // the Mondrian kinds (one unit per pole after mean-weight normalization).
  double direction_mass() const noexcept;
  // Cumulative axis-choice probabilities (proportional to the weights).
  const std::vector<double>& axis_cdf() const noexcept { return axis_cdf_; }
  RateMode default_rate_mode() const noexcept {
    return axis_aligned() ? RateMode::kExact : RateMode::kBall;
  }

 private:
  MeasureKind kind_;
  std::size_t dimension_;
  std::vector<double> weights_;  // all ones for unweighted kinds
  std::vector<double> axis_cdf_;
};

void sample_direction(const RtpMeasure& measure, Rng& rng,
                      std::span<double> out);
std::vector<double> sample_direction(const RtpMeasure& measure, Rng& rng);

// Event rate of hull(points[indices]). `ball` may be passed when already
// known. Throws UsageError for kExact on a non-axis-aligned measure.
double polytope_rate(const RtpMeasure& measure, const PointMatrix& points,
                     std::span<const int> indices, RateMode mode,
                     const Ball* ball = nullptr);

struct CutProposal {
  Hyperplane hyperplane;
  int polytope_id = 0;
};

inline constexpr long kMaxCutRejections = 1'000'000;

// Rejection sampler: direction from the measure, offset uniform on [0, r],
// plane translated by the ball center; accepted once it separates the
// points. Throws NumericalError after kMaxCutRejections failures.
CutProposal sample_cut(const RtpMeasure& measure, const PointMatrix& points,
                       std::span<const int> indices, const Ball& ball,
                       Rng& rng, int polytope_id = 0);
CutProposal sample_cut(const RtpMeasure& measure, const PointMatrix& points,
                       std::span<const int> indices, Rng& rng,
                       int polytope_id = 0);

}  // namespace rtp
