#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "rtp/measure.hpp"
#include "rtp/random.hpp"
#include "rtp/tessellation.hpp"

namespace rtp {

struct SmcConfig {
  int particles = 20;
  double budget = std::numeric_limits<double>::infinity();
  RtpMeasure measure{MeasureKind::kUniform, 1};
  std::optional<RateMode> rate_mode;  // measure default when unset
  std::vector<double> alpha;          // empirical (n_k / 1000) when empty
  bool likelihood_weighting = true;
  std::uint64_t seed = 0;
  // Stop each particle after this many accepted cuts (cut-count budget).
  std::optional<int> max_cuts;
};

struct Particle {
  Tessellation tessellation;
  double log_weight = 0.0;
  bool finished = false;
};

struct PosteriorEstimate {
  std::vector<Particle> particles;
  std::vector<double> weights;  // normalized
  std::size_t selected = 0;     // argmax weight, lowest index on ties
  std::vector<double> alpha;
  int iterations = 0;

  const Tessellation& best() const { return particles[selected].tessellation; }
};

// Called after every SMC iteration with the normalized weights.
using SmcObserver = std::function<void(int iteration, std::span<const Particle>,
                                       std::span<const double> weights)>;

// Sequential Monte Carlo over tessellations: multinomial resampling at the
// top of every iteration after the first, one jump per unfinished particle,
// reweighting by the cut's likelihood ratio. The final particle set is
// returned unresampled. Randomness for particle slot m at iteration t comes
// from its own substream of `seed`.
PosteriorEstimate run_smc(std::shared_ptr<const PointData> data,
                          const SmcConfig& config,
                          const SmcObserver& observer = {});

// Ancestor indices for `count` offspring drawn with replacement in
// proportion to `weights`.
std::vector<std::size_t> multinomial_resample(std::span<const double> weights,
                                              std::size_t count, Rng& rng);

std::size_t argmax_lowest(std::span<const double> values);

struct Prediction {
  std::vector<std::vector<double>> probabilities;
  std::vector<int> labels;
};

// Leaf posterior predictive for each requested row. Rows must be part of
// the tessellated data (augmented test rows included).
Prediction predict(const Tessellation& tessellation,
                   std::span<const double> alpha, std::span<const int> rows);
Prediction predict(const PosteriorEstimate& estimate, std::span<const int> rows);

}  // namespace rtp
