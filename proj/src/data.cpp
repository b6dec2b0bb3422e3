#include "rtp/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "rtp/errors.hpp"

namespace rtp {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s.remove_prefix(1);
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = line.find(',');
    out.push_back(trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return out;
}

bool parse_finite(std::string_view s, double& value) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() &&
         std::isfinite(value);
}

void append_double(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

}  // namespace

LabeledDataset read_csv(std::istream& in, const std::string& label_column,
                        std::vector<std::string> dictionary, bool label_optional) {
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(DataErrorKind::kEmptyFile, "CSV input is empty");
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_fields(line);
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  const bool has_label = label_it != header.end();
  if (!has_label && !label_optional) {
    throw DataError(DataErrorKind::kMissingLabelColumn,
                    "CSV has no label column '" + label_column + "'");
  }
  const std::size_t label_pos =
      has_label ? static_cast<std::size_t>(label_it - header.begin()) : header.size();

  LabeledDataset ds;
  ds.label_column = label_column;
  ds.label_dictionary = std::move(dictionary);
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j != label_pos) ds.feature_names.emplace_back(header[j]);
  }
  if (ds.feature_names.empty()) {
    throw DataError(DataErrorKind::kEmptyInput, "CSV has no predictor columns");
  }

  std::vector<double> values;
  std::vector<double> row(ds.feature_names.size());
  std::size_t line_no = 1;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw DataError(DataErrorKind::kRaggedRow,
                      "CSV line " + std::to_string(line_no) + " has " +
                          std::to_string(fields.size()) + " fields, expected " +
                          std::to_string(header.size()));
    }
    std::size_t k = 0;
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (j == label_pos) continue;
      if (!parse_finite(fields[j], row[k])) {
        throw DataError(DataErrorKind::kNonNumericCell,
                        "CSV line " + std::to_string(line_no) + ", column '" +
                            std::string(header[j]) + "': '" +
                            std::string(fields[j]) + "' is not a finite number");
      }
      ++k;
    }
    values.insert(values.end(), row.begin(), row.end());
    const std::string_view label = has_label ? fields[label_pos] : kMissingLabelMarker;
    if (label == kMissingLabelMarker) {
      ds.labels.push_back(kMissingLabel);
    } else {
      auto it = std::find(ds.label_dictionary.begin(), ds.label_dictionary.end(), label);
      if (it == ds.label_dictionary.end()) {
        ds.label_dictionary.emplace_back(label);
        it = ds.label_dictionary.end() - 1;
      }
      ds.labels.push_back(static_cast<int>(it - ds.label_dictionary.begin()));
    }
    ++rows;
  }
  if (rows == 0) {
    throw DataError(DataErrorKind::kEmptyFile, "CSV has a header but no rows");
  }
  ds.predictors = PointMatrix(rows, ds.feature_names.size(), std::move(values));
  return ds;
}

LabeledDataset load_csv(const std::filesystem::path& path,
                        const std::string& label_column,
                        std::vector<std::string> dictionary, bool label_optional) {
  std::ifstream in(path);
  if (!in) {
    throw DataError(DataErrorKind::kEmptyFile,
                    "cannot open '" + path.string() + "'");
  }
  return read_csv(in, label_column, std::move(dictionary), label_optional);
}

void write_csv(std::ostream& out, const LabeledDataset& data) {
  std::string line;
  for (const auto& name : data.feature_names) line += name + ',';
  line += data.label_column + '\n';
  out << line;
  for (std::size_t i = 0; i < data.size(); ++i) {
    line.clear();
    for (double v : data.predictors.row(i)) {
      append_double(line, v);
      line += ',';
    }
    const int z = data.labels[i];
    line += z == kMissingLabel ? std::string(kMissingLabelMarker)
                               : data.label_dictionary.at(static_cast<std::size_t>(z));
    line += '\n';
    out << line;
  }
}

void write_csv(const std::filesystem::path& path, const LabeledDataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(DataErrorKind::kOther, "cannot write '" + path.string() + "'");
  write_csv(out, data);
}

LabeledDataset subset(const LabeledDataset& data, std::span<const int> rows) {
  LabeledDataset out;
  out.label_dictionary = data.label_dictionary;
  out.feature_names = data.feature_names;
  out.label_column = data.label_column;
  out.predictors = PointMatrix(rows.size(), data.dimension());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = data.predictors.row(static_cast<std::size_t>(rows[i]));
    std::copy(src.begin(), src.end(), out.predictors.row(i).begin());
    out.labels.push_back(data.labels[static_cast<std::size_t>(rows[i])]);
  }
  return out;
}

int mondrian_cube_label(std::array<double, 3> p) {
  const bool small = p[0] <= 0.25 && p[1] <= 0.25 && p[2] <= 0.25;
  const bool large = p[0] >= 0.25 && p[1] >= 0.25 && p[2] >= 0.25;
  return small || large ? 0 : 1;
}

std::array<double, 3> mondrian_cube_rotate(std::array<double, 3> p) {
  const double a = std::numbers::pi / 4.0;
  // R_x(pi/4)
  const double cx = std::cos(a);
  const double sx = std::sin(a);
  const std::array<double, 3> q{p[0], cx * p[1] - sx * p[2], sx * p[1] + cx * p[2]};
  // R_y(-pi/4)
  const double cy = std::cos(-a);
  const double sy = std::sin(-a);
  return {cy * q[0] + sy * q[2], q[1], -sy * q[0] + cy * q[2]};
}

LabeledDataset mondrian_cube(std::size_t n, Rng& rng) {
  if (n == 0) throw UsageError("mondrian cube needs n >= 1");
  LabeledDataset ds;
  ds.feature_names = {"x", "y", "z"};
  ds.label_dictionary = {"1", "2"};
  ds.predictors = PointMatrix(n, 3);
  ds.labels.reserve(n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::array<double, 3> p{unit(rng), unit(rng), unit(rng)};
    ds.labels.push_back(mondrian_cube_label(p));
    for (double& v : p) v -= 0.5;
    const auto r = mondrian_cube_rotate(p);
    std::copy(r.begin(), r.end(), ds.predictors.row(i).begin());
  }
  return ds;
}

LabeledDataset synthetic_pc_scores(std::size_t rows, std::size_t cols,
                                   std::size_t minority, Rng& rng) {
  if (rows < 2 || cols < 2 || minority == 0 || minority >= rows) {
    throw UsageError("synthetic PC table needs rows >= 2, cols >= 2 and "
                     "0 < minority < rows");
  }
  LabeledDataset ds;
  for (std::size_t j = 0; j < cols; ++j) ds.feature_names.push_back("PC" + std::to_string(j + 1));
  ds.label_dictionary = {"grade_IV", "grade_III"};

  std::vector<int> labels(rows, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(minority), 1);
  std::shuffle(labels.begin(), labels.end(), rng);

  std::normal_distribution<double> gauss(0.0, 1.0);
  ds.predictors = PointMatrix(rows, cols);
  std::vector<double> spread(cols);
  for (std::size_t j = 0; j < cols; ++j) spread[j] = 10.0 * std::pow(0.93, static_cast<double>(j));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) ds.predictors(i, j) = spread[j] * gauss(rng);
    if (labels[i] == 1) {
      // Minority class shifted along an oblique direction of PC1-PC3.
      ds.predictors(i, 0) += 0.9 * spread[0];
      ds.predictors(i, 1) -= 0.9 * spread[1];
      ds.predictors(i, 2) += 0.6 * spread[2];
    }
  }
  for (std::size_t j = 0; j < cols; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < rows; ++i) mean += ds.predictors(i, j);
    mean /= static_cast<double>(rows);
    for (std::size_t i = 0; i < rows; ++i) ds.predictors(i, j) -= mean;
  }
  ds.labels = std::move(labels);
  return ds;
}

Split split(std::size_t n, double train_fraction, Rng& rng) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw UsageError("train fraction must be in (0, 1)");
  }
  if (n == 0) throw UsageError("cannot split an empty dataset");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = std::uniform_int_distribution<std::size_t>(0, i)(rng);
    std::swap(perm[i], perm[j]);
  }
  const auto k = static_cast<std::size_t>(
      std::floor(train_fraction * static_cast<double>(n) + 0.5));
  Split s;
  s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k));
  s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(k), perm.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

Split split(std::size_t n, const SplitSpec& spec) {
  Rng rng = make_rng(spec.seed, 0x5EED5, static_cast<std::uint64_t>(spec.replicate));
  return split(n, spec.train_fraction, rng);
}

Standardizer::Standardizer(std::vector<double> means, std::vector<double> sds)
    : means_(std::move(means)), sds_(std::move(sds)) {
  if (means_.size() != sds_.size()) {
    throw DataError(DataErrorKind::kDimensionMismatch, "standardizer size mismatch");
  }
}

Standardizer Standardizer::identity(std::size_t dimension) {
  return Standardizer(std::vector<double>(dimension, 0.0),
                      std::vector<double>(dimension, 1.0));
}

Standardizer Standardizer::fit(const LabeledDataset& data, std::span<const int> rows) {
  const std::size_t d = data.dimension();
  if (d == 0) throw DataError(DataErrorKind::kEmptyInput, "no columns to standardize");
  if (rows.size() < 2) {
    throw DataError(DataErrorKind::kEmptyInput, "standardizing needs >= 2 rows");
  }
  std::vector<double> means(d, 0.0);
  for (int r : rows) {
    for (std::size_t j = 0; j < d; ++j) means[j] += data.predictors(static_cast<std::size_t>(r), j);
  }
  for (double& m : means) m /= static_cast<double>(rows.size());
  std::vector<double> sds(d, 0.0);
  for (int r : rows) {
    for (std::size_t j = 0; j < d; ++j) {
      const double t = data.predictors(static_cast<std::size_t>(r), j) - means[j];
      sds[j] += t * t;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    sds[j] = std::sqrt(sds[j] / static_cast<double>(rows.size() - 1));
    if (!(sds[j] > 0.0)) {
      throw DataError(DataErrorKind::kConstantColumn,
                      "column '" + (j < data.feature_names.size()
                                        ? data.feature_names[j]
                                        : std::to_string(j)) +
                          "' is constant on the training rows");
    }
  }
  return Standardizer(std::move(means), std::move(sds));
}

PointMatrix Standardizer::apply(const PointMatrix& points) const {
  if (points.cols() != means_.size()) {
    throw DataError(DataErrorKind::kDimensionMismatch,
                    "standardizer fitted on a different number of columns");
  }
  PointMatrix out = points;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) {
      out(i, j) = (out(i, j) - means_[j]) / sds_[j];
    }
  }
  return out;
}

std::vector<double> column_variances(const PointMatrix& points,
                                     std::span<const int> rows) {
  const std::size_t d = points.cols();
  std::vector<double> mean(d, 0.0);
  std::vector<double> var(d, 0.0);
  if (rows.size() < 2) return var;
  for (int r : rows) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += points(static_cast<std::size_t>(r), j);
  }
  for (double& m : mean) m /= static_cast<double>(rows.size());
  for (int r : rows) {
    for (std::size_t j = 0; j < d; ++j) {
      const double t = points(static_cast<std::size_t>(r), j) - mean[j];
      var[j] += t * t;
    }
  }
  for (double& v : var) v /= static_cast<double>(rows.size() - 1);
  return var;
}

AugmentedData augment(const PointMatrix& train_points,
                      std::span<const int> train_labels, int num_classes,
                      const PointMatrix& test_points) {
  if (train_points.rows() != train_labels.size()) {
    throw DataError(DataErrorKind::kDimensionMismatch,
                    "training labels do not match training rows");
  }
  if (!test_points.empty() && test_points.cols() != train_points.cols()) {
    throw DataError(DataErrorKind::kDimensionMismatch,
                    "test rows have a different number of columns");
  }
  PointMatrix all(train_points.rows() + test_points.rows(), train_points.cols());
  std::vector<int> labels(train_labels.begin(), train_labels.end());
  for (std::size_t i = 0; i < train_points.rows(); ++i) {
    std::copy(train_points.row(i).begin(), train_points.row(i).end(), all.row(i).begin());
  }
  AugmentedData out;
  for (std::size_t i = 0; i < test_points.rows(); ++i) {
    const std::size_t dst = train_points.rows() + i;
    std::copy(test_points.row(i).begin(), test_points.row(i).end(), all.row(dst).begin());
    labels.push_back(kMissingLabel);
    out.test_rows.push_back(static_cast<int>(dst));
  }
  out.data = make_point_data(std::move(all), std::move(labels), num_classes);
  return out;
}

}  // namespace rtp
