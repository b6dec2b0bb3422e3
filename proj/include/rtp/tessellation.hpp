#pragma once

#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "rtp/geometry.hpp"
#include "rtp/likelihood.hpp"
#include "rtp/measure.hpp"
#include "rtp/random.hpp"

namespace rtp {

inline constexpr int kMissingLabel = -1;

// The shared, immutable point set a tessellation partitions: training rows
// (labeled) followed by any augmented test rows (label kMissingLabel).
struct PointData {
  PointMatrix points;
  std::vector<int> labels;  // empty for fully unlabeled data
  int num_classes = 0;
  std::unique_ptr<const DistanceCache> distances;

  std::size_t size() const noexcept { return points.rows(); }
  bool labeled() const noexcept { return !labels.empty(); }
};

// Validates the inputs and builds the pairwise distance cache when it pays
// off (high dimension, moderate n). `labels` may be empty.
std::shared_ptr<const PointData> make_point_data(PointMatrix points,
                                                 std::vector<int> labels = {},
                                                 int num_classes = 0);

// A leaf of the tessellation, stored as the rows of the data it contains.
struct Polytope {
  int id = 0;
  std::vector<int> indices;
  std::vector<int> counts;  // labeled counts per class; empty if unlabeled
  Ball ball;
  double rate = 0.0;
  bool paused = false;
  double birth_time = 0.0;
};

struct CutRecord {
  double time = 0.0;
  int parent_id = 0;
  int minus_id = 0;
  int plus_id = 0;
  Hyperplane plane;
};

enum class AdvanceEvent { kCutApplied, kBudgetExhausted, kAllPaused };

struct AdvanceResult {
  AdvanceEvent event = AdvanceEvent::kAllPaused;
  std::shared_ptr<const Polytope> parent;
  std::shared_ptr<const Polytope> minus;
  std::shared_ptr<const Polytope> plus;
};

struct TessellationOptions {
  double budget = std::numeric_limits<double>::infinity();
  RateMode rate_mode = RateMode::kBall;
  // Pause leaves whose labeled points share one label. Only meaningful for
  // labeled data; leaves with fewer than two distinct points always pause.
  bool pause_pure = true;
};

// Tessellation-valued jump process over a point set. Leaves are immutable and
// shared between copies, so copying a tessellation (SMC resampling) is cheap.
class Tessellation {
 public:
  using LeafPtr = std::shared_ptr<const Polytope>;

  // Single root leaf holding every row, clock at zero.
  Tessellation(std::shared_ptr<const PointData> data, RtpMeasure measure,
               TessellationOptions options = {});

  // Rebuild a tessellation by applying a recorded cut sequence.
  static Tessellation replay(std::shared_ptr<const PointData> data,
                             RtpMeasure measure, TessellationOptions options,
                             std::span<const CutRecord> cuts);

  // One jump of the process: exponential holding time, leaf chosen with
  // probability proportional to its rate, cut by the rejection sampler.
  AdvanceResult advance(Rng& rng);

  // Split leaf `parent_id` by `plane` at `time`; both children must be
  // nonempty. Child ids are the next two unused ids unless given.
  AdvanceResult apply_cut(int parent_id, const Hyperplane& plane, double time,
                          int minus_id = -1, int plus_id = -1);

  int locate(int index) const;
  // Leaf id of every row.
  std::vector<int> leaf_assignment() const;
  LeafPtr leaf(int id) const;

  const std::vector<LeafPtr>& leaves() const noexcept { return leaves_; }
  std::vector<CutRecord> cut_log() const;
  std::size_t num_leaves() const noexcept { return leaves_.size(); }
  std::size_t num_cuts() const noexcept { return cuts_.size(); }
  double clock() const noexcept { return clock_; }
  double budget() const noexcept { return options_.budget; }
  double total_rate() const;
  bool all_paused() const;
  CountTable leaf_counts() const;

  const PointData& data() const noexcept { return *data_; }
  const std::shared_ptr<const PointData>& data_ptr() const noexcept {
    return data_;
  }
  const RtpMeasure& measure() const noexcept { return measure_; }
  const TessellationOptions& options() const noexcept { return options_; }

 private:
  LeafPtr make_leaf(int id, std::vector<int> indices, double birth) const;

  std::shared_ptr<const PointData> data_;
  RtpMeasure measure_;
  TessellationOptions options_;
  std::vector<LeafPtr> leaves_;
  std::vector<std::shared_ptr<const CutRecord>> cuts_;
  double clock_ = 0.0;
  int next_id_ = 1;
};

// Line format: time,parent_id,child_minus_id,child_plus_id,u,anchor...,normal...
// with 17 significant digits per float.
void write_cut_log(std::ostream& os, std::span<const CutRecord> cuts);
std::vector<CutRecord> read_cut_log(std::istream& is);

// --- exact 2D prior draws --------------------------------------------------

struct PriorDraw2D {
  std::vector<ConvexPolygon2D> cells;
  std::vector<Hyperplane> cuts;
};

// The generative process run on an explicit polygon, cells clipped exactly.
// kBall: each cell's rate is the radius of its minimal enclosing circle and
// planes are resampled until they hit the cell. kExact: proposals arrive at
// the enclosing circle's full hyperplane mass and misses are discarded
// (thinning), which gives every cell its exact rate.
PriorDraw2D prior_draw_2d(const ConvexPolygon2D& domain,
                          const RtpMeasure& measure, double budget, Rng& rng,
                          RateMode mode);

}  // namespace rtp
