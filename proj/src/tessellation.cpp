#include "rtp/tessellation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "rtp/errors.hpp"

namespace rtp {

namespace {

constexpr std::size_t kCacheMinDimension = 8;
constexpr std::size_t kCacheMaxRows = 4096;

}  // namespace

std::shared_ptr<const PointData> make_point_data(PointMatrix points,
                                                 std::vector<int> labels,
                                                 int num_classes) {
  if (points.rows() == 0 || points.cols() == 0) {
    throw DataError(DataErrorKind::kEmptyInput,
                    "point data needs at least one row and one column");
  }
  for (double v : points.values()) {
    if (!std::isfinite(v)) {
      throw DataError(DataErrorKind::kNonNumericCell,
                      "point data contains a non-finite value");
    }
  }
  if (!labels.empty()) {
    if (labels.size() != points.rows()) {
      throw DataError(DataErrorKind::kDimensionMismatch,
                      "label count does not match row count");
    }
    if (num_classes < 1) {
      throw DataError(DataErrorKind::kOther, "labeled data needs >= 1 class");
    }
    for (int z : labels) {
      if (z < kMissingLabel || z >= num_classes) {
        throw DataError(DataErrorKind::kOther, "label code out of range");
      }
    }
  }
  auto data = std::make_shared<PointData>();
  data->points = std::move(points);
  data->labels = std::move(labels);
  data->num_classes = data->labels.empty() ? 0 : num_classes;
  if (data->points.cols() >= kCacheMinDimension &&
      data->points.rows() <= kCacheMaxRows) {
    data->distances = std::make_unique<const DistanceCache>(data->points);
  }
  return data;
}

Tessellation::Tessellation(std::shared_ptr<const PointData> data,
                           RtpMeasure measure, TessellationOptions options)
    : data_(std::move(data)), measure_(std::move(measure)), options_(options) {
  if (!data_ || data_->size() == 0) {
    throw DataError(DataErrorKind::kEmptyInput,
                    "cannot tessellate an empty dataset");
  }
  if (data_->points.cols() != measure_.dimension()) {
    throw DataError(DataErrorKind::kDimensionMismatch,
                    "measure dimension does not match the data");
  }
  if (!(options_.budget >= 0.0)) {
    throw UsageError("budget must be nonnegative");
  }
  std::vector<int> all(data_->size());
  std::iota(all.begin(), all.end(), 0);
  leaves_.push_back(make_leaf(0, std::move(all), 0.0));
}

Tessellation::LeafPtr Tessellation::make_leaf(int id, std::vector<int> indices,
                                              double birth) const {
  auto leaf = std::make_shared<Polytope>();
  leaf->id = id;
  leaf->indices = std::move(indices);
  leaf->birth_time = birth;
  const PointData& data = *data_;
  bool pure = false;
  if (data.labeled()) {
    leaf->counts.assign(static_cast<std::size_t>(data.num_classes), 0);
    for (int idx : leaf->indices) {
      const int z = data.labels[static_cast<std::size_t>(idx)];
      if (z >= 0) ++leaf->counts[static_cast<std::size_t>(z)];
    }
    const auto occupied = std::count_if(leaf->counts.begin(),
                                        leaf->counts.end(),
                                        [](int c) { return c > 0; });
    pure = occupied <= 1;
  }
  leaf->ball = enclosing_ball(data.points, leaf->indices, data.distances.get());
  const bool degenerate = !(leaf->ball.radius > 0.0);
  leaf->paused = degenerate || (data.labeled() && options_.pause_pure && pure);
  leaf->rate = degenerate ? 0.0
                          : polytope_rate(measure_, data.points, leaf->indices,
                                          options_.rate_mode, &leaf->ball);
  return leaf;
}

double Tessellation::total_rate() const {
  double total = 0.0;
  for (const auto& leaf : leaves_) {
    if (!leaf->paused) total += leaf->rate;
  }
  return total;
}

bool Tessellation::all_paused() const {
  return std::all_of(leaves_.begin(), leaves_.end(),
                     [](const LeafPtr& l) { return l->paused || !(l->rate > 0.0); });
}

AdvanceResult Tessellation::advance(Rng& rng) {
  const double total = total_rate();
  if (!(total > 0.0)) return {AdvanceEvent::kAllPaused, nullptr, nullptr, nullptr};

  const double wait = std::exponential_distribution<double>(total)(rng);
  if (clock_ + wait > options_.budget) {
    clock_ = options_.budget;
    return {AdvanceEvent::kBudgetExhausted, nullptr, nullptr, nullptr};
  }
  clock_ += wait;

  const double target = std::uniform_real_distribution<double>(0.0, total)(rng);
  const Polytope* chosen = nullptr;
  double acc = 0.0;
  for (const auto& leaf : leaves_) {
    if (leaf->paused || !(leaf->rate > 0.0)) continue;
    chosen = leaf.get();
    acc += leaf->rate;
    if (target < acc) break;
  }
  const CutProposal cut = sample_cut(measure_, data_->points, chosen->indices,
                                     chosen->ball, rng, chosen->id);
  return apply_cut(chosen->id, cut.hyperplane, clock_);
}

AdvanceResult Tessellation::apply_cut(int parent_id, const Hyperplane& plane,
                                      double time, int minus_id, int plus_id) {
  const auto it = std::find_if(leaves_.begin(), leaves_.end(),
                               [&](const LeafPtr& l) { return l->id == parent_id; });
  if (it == leaves_.end()) {
    throw DataError(DataErrorKind::kUnknownIndex,
                    "cut refers to unknown leaf " + std::to_string(parent_id));
  }
  const LeafPtr parent = *it;
  const PointMatrix& points = data_->points;
  if (plane.dimension() != points.cols()) {
    throw DataError(DataErrorKind::kDimensionMismatch,
                    "cut plane dimension does not match the data");
  }
  const double level = plane.level();
  std::vector<int> minus;
  std::vector<int> plus;
  for (int idx : parent->indices) {
    const double s = dot(plane.normal, points.row(static_cast<std::size_t>(idx))) - level;
    // Ties go to the nonnegative side.
    (s < 0.0 ? minus : plus).push_back(idx);
  }
  if (minus.empty() || plus.empty()) {
    throw NumericalError("cut of leaf " + std::to_string(parent_id) +
                         " leaves one side empty");
  }
  if (minus_id < 0) minus_id = next_id_++;
  if (plus_id < 0) plus_id = next_id_++;
  next_id_ = std::max({next_id_, minus_id + 1, plus_id + 1});

  AdvanceResult result;
  result.event = AdvanceEvent::kCutApplied;
  result.parent = parent;
  result.minus = make_leaf(minus_id, std::move(minus), time);
  result.plus = make_leaf(plus_id, std::move(plus), time);
  *it = result.minus;
  leaves_.push_back(result.plus);

  auto record = std::make_shared<CutRecord>();
  record->time = time;
  record->parent_id = parent_id;
  record->minus_id = minus_id;
  record->plus_id = plus_id;
  record->plane = plane;
  cuts_.push_back(std::move(record));
  return result;
}

Tessellation Tessellation::replay(std::shared_ptr<const PointData> data,
                                  RtpMeasure measure,
                                  TessellationOptions options,
                                  std::span<const CutRecord> cuts) {
  Tessellation t(std::move(data), std::move(measure), options);
  for (const CutRecord& c : cuts) {
    if (c.time < t.clock_) {
      throw DataError(DataErrorKind::kOther, "cut log times are not increasing");
    }
    t.apply_cut(c.parent_id, c.plane, c.time, c.minus_id, c.plus_id);
    t.clock_ = c.time;
  }
  return t;
}

int Tessellation::locate(int index) const {
  if (index < 0 || static_cast<std::size_t>(index) >= data_->size()) {
    throw DataError(DataErrorKind::kUnknownIndex,
                    "row index " + std::to_string(index) + " is not in the data");
  }
  for (const auto& leaf : leaves_) {
    if (std::binary_search(leaf->indices.begin(), leaf->indices.end(), index)) {
      return leaf->id;
    }
  }
  throw DataError(DataErrorKind::kUnknownIndex,
                  "row " + std::to_string(index) + " is in no leaf");
}

std::vector<int> Tessellation::leaf_assignment() const {
  std::vector<int> out(data_->size(), -1);
  for (const auto& leaf : leaves_) {
    for (int idx : leaf->indices) out[static_cast<std::size_t>(idx)] = leaf->id;
  }
  return out;
}

Tessellation::LeafPtr Tessellation::leaf(int id) const {
  for (const auto& l : leaves_) {
    if (l->id == id) return l;
  }
  throw DataError(DataErrorKind::kUnknownIndex,
                  "no leaf with id " + std::to_string(id));
}

std::vector<CutRecord> Tessellation::cut_log() const {
  std::vector<CutRecord> out;
  out.reserve(cuts_.size());
  for (const auto& c : cuts_) out.push_back(*c);
  return out;
}

CountTable Tessellation::leaf_counts() const {
  CountTable table;
  table.reserve(leaves_.size());
  for (const auto& leaf : leaves_) table.push_back(leaf->counts);
  return table;
}

// --- cut log I/O -------------------------------------------------------------

namespace {

void put_double(std::string& line, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, 17);
  line.append(buf, res.ptr);
}

double parse_double(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw DataError(DataErrorKind::kNonNumericCell,
                    "cut log line " + std::to_string(line_no) +
                        ": bad number '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace

void write_cut_log(std::ostream& os, std::span<const CutRecord> cuts) {
  std::string line;
  for (const CutRecord& c : cuts) {
    line.clear();
    put_double(line, c.time);
    line += ',' + std::to_string(c.parent_id) + ',' + std::to_string(c.minus_id) +
            ',' + std::to_string(c.plus_id) + ',';
    put_double(line, c.plane.offset);
    for (double a : c.plane.anchor) {
      line += ',';
      put_double(line, a);
    }
    for (double n : c.plane.normal) {
      line += ',';
      put_double(line, n);
    }
    line += '\n';
    os << line;
  }
}

std::vector<CutRecord> read_cut_log(std::istream& is) {
  std::vector<CutRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() < 7 || (fields.size() - 5) % 2 != 0) {
      throw DataError(DataErrorKind::kRaggedRow,
                      "cut log line " + std::to_string(line_no) +
                          " has an invalid field count");
    }
    const std::size_t d = (fields.size() - 5) / 2;
    CutRecord c;
    c.time = parse_double(fields[0], line_no);
    c.parent_id = static_cast<int>(parse_double(fields[1], line_no));
    c.minus_id = static_cast<int>(parse_double(fields[2], line_no));
    c.plus_id = static_cast<int>(parse_double(fields[3], line_no));
    c.plane.offset = parse_double(fields[4], line_no);
    for (std::size_t j = 0; j < d; ++j) {
      c.plane.anchor.push_back(parse_double(fields[5 + j], line_no));
    }
    for (std::size_t j = 0; j < d; ++j) {
      c.plane.normal.push_back(parse_double(fields[5 + d + j], line_no));
    }
    if (!out.empty() && out.back().plane.dimension() != d) {
      throw DataError(DataErrorKind::kRaggedRow,
                      "cut log line " + std::to_string(line_no) +
                          " changes dimension");
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace rtp
