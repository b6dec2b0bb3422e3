#include "rtp/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/random/normal_distribution.hpp>

#include "rtp/errors.hpp"

namespace rtp {

std::string_view to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::kUniform: return "urtp";
    case MeasureKind::kWeightedUniform: return "wurtp";
    case MeasureKind::kMondrian: return "mrtp";
    case MeasureKind::kWeightedMondrian: return "wmrtp";
  }
  return "?";
}

std::string_view to_string(RateMode mode) {
  return mode == RateMode::kBall ? "ball" : "exact";
}

MeasureKind parse_measure_kind(std::string_view name) {
  if (name == "urtp") return MeasureKind::kUniform;
  if (name == "wurtp") return MeasureKind::kWeightedUniform;
  if (name == "mrtp") return MeasureKind::kMondrian;
  if (name == "wmrtp") return MeasureKind::kWeightedMondrian;
  throw UsageError("unknown measure '" + std::string(name) +
                   "' (expected urtp, wurtp, mrtp or wmrtp)");
}

RateMode parse_rate_mode(std::string_view name) {
  if (name == "ball") return RateMode::kBall;
  if (name == "exact") return RateMode::kExact;
  throw UsageError("unknown rate mode '" + std::string(name) +
                   "' (expected ball or exact)");
}

RtpMeasure::RtpMeasure(MeasureKind kind, std::size_t dimension,
                       std::vector<double> weights)
    : kind_(kind), dimension_(dimension) {
  if (dimension == 0) throw UsageError("measure dimension must be >= 1");
  const bool weighted = kind == MeasureKind::kWeightedUniform ||
                        kind == MeasureKind::kWeightedMondrian;
  if (weighted) {
    if (weights.size() != dimension) {
      throw UsageError("weighted measure needs " + std::to_string(dimension) +
                       " weights, got " + std::to_string(weights.size()));
    }
    for (double w : weights) {
      if (!(w > 0.0) || !std::isfinite(w)) {
        throw UsageError("measure weights must be finite and > 0");
      }
    }
    weights_ = std::move(weights);
  } else {
    weights_.assign(dimension, 1.0);
  }
  axis_cdf_.resize(dimension);
  std::partial_sum(weights_.begin(), weights_.end(), axis_cdf_.begin());
  const double total = axis_cdf_.back();
  for (double& c : axis_cdf_) c /= total;
  axis_cdf_.back() = 1.0;
}

double RtpMeasure::direction_mass() const noexcept {
  return axis_aligned() ? 2.0 * static_cast<double>(dimension_) : 1.0;
}

void sample_direction(const RtpMeasure& measure, Rng& rng,
                      std::span<double> out) {
  const std::size_t d = measure.dimension();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  switch (measure.kind()) {
    case MeasureKind::kUniform:
    case MeasureKind::kWeightedUniform: {
      boost::random::normal_distribution<double> gauss(0.0, 1.0);
      const auto& w = measure.weights();
      double norm2 = 0.0;
      do {
        norm2 = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          out[i] = w[i] * gauss(rng);
          norm2 += out[i] * out[i];
        }
      } while (!(norm2 > 0.0));
      const double inv = 1.0 / std::sqrt(norm2);
      for (std::size_t i = 0; i < d; ++i) out[i] *= inv;
      return;
    }
    case MeasureKind::kMondrian:
    case MeasureKind::kWeightedMondrian: {
      std::fill(out.begin(), out.end(), 0.0);
      std::size_t axis = 0;
      if (measure.kind() == MeasureKind::kMondrian) {
        axis = std::uniform_int_distribution<std::size_t>(0, d - 1)(rng);
      } else {
        const auto& cdf = measure.axis_cdf();
        const double target = unit(rng);
        axis = static_cast<std::size_t>(
            std::upper_bound(cdf.begin(), cdf.end(), target) - cdf.begin());
        axis = std::min(axis, d - 1);
      }
      out[axis] = unit(rng) < 0.5 ? -1.0 : 1.0;
      return;
    }
  }
}

std::vector<double> sample_direction(const RtpMeasure& measure, Rng& rng) {
  std::vector<double> out(measure.dimension());
  sample_direction(measure, rng, out);
  return out;
}

double polytope_rate(const RtpMeasure& measure, const PointMatrix& points,
                     std::span<const int> indices, RateMode mode,
                     const Ball* ball) {
  if (indices.empty()) {
    throw DataError(DataErrorKind::kEmptyInput, "rate of an empty polytope");
  }
  if (points.cols() != measure.dimension()) {
    throw DataError(DataErrorKind::kDimensionMismatch,
                    "measure and point dimensions differ");
  }
  if (mode == RateMode::kBall) {
    if (ball) return ball->radius;
    return enclosing_ball(points, indices).radius;
  }
  if (!measure.axis_aligned()) {
    throw UsageError(
        "exact rates are only available for the Mondrian measures; use "
        "--rate-mode ball");
  }
  const std::size_t d = points.cols();
  std::vector<double> lo(points.row(static_cast<std::size_t>(indices[0])).begin(),
                         points.row(static_cast<std::size_t>(indices[0])).end());
  std::vector<double> hi = lo;
  for (int idx : indices) {
    const auto p = points.row(static_cast<std::size_t>(idx));
    for (std::size_t j = 0; j < d; ++j) {
      lo[j] = std::min(lo[j], p[j]);
      hi[j] = std::max(hi[j], p[j]);
    }
  }
  const auto& w = measure.weights();
  const double mean_w =
      std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(d);
  double rate = 0.0;
  for (std::size_t j = 0; j < d; ++j) rate += (w[j] / mean_w) * (hi[j] - lo[j]);
  return rate;
}

CutProposal sample_cut(const RtpMeasure& measure, const PointMatrix& points,
                       std::span<const int> indices, const Ball& ball,
                       Rng& rng, int polytope_id) {
  if (points.cols() != measure.dimension()) {
    throw DataError(DataErrorKind::kDimensionMismatch,
                    "measure and point dimensions differ");
  }
  if (indices.size() < 2 || !(ball.radius > 0.0)) {
    throw NumericalError("cannot cut a polytope with fewer than two distinct points");
  }
  CutProposal proposal;
  proposal.polytope_id = polytope_id;
  Hyperplane& h = proposal.hyperplane;
  h.anchor = ball.center;
  h.normal.resize(measure.dimension());
  std::uniform_real_distribution<double> offset(0.0, ball.radius);
  for (long attempt = 0; attempt < kMaxCutRejections; ++attempt) {
    sample_direction(measure, rng, h.normal);
    h.offset = offset(rng);
    if (hyperplane_cuts_hull(points, indices, h)) return proposal;
  }
  throw NumericalError("cut sampler exceeded " +
                       std::to_string(kMaxCutRejections) +
                       " rejections; the polytope is numerically degenerate");
}

CutProposal sample_cut(const RtpMeasure& measure, const PointMatrix& points,
                       std::span<const int> indices, Rng& rng,
                       int polytope_id) {
  if (indices.empty()) {
    throw DataError(DataErrorKind::kEmptyInput, "cut of an empty polytope");
  }
  const Ball ball = enclosing_ball(points, indices);
  return sample_cut(measure, points, indices, ball, rng, polytope_id);
}

}  // namespace rtp
