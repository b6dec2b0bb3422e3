#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rtp/geometry.hpp"
#include "rtp/random.hpp"
#include "rtp/tessellation.hpp"

namespace rtp {

inline constexpr std::string_view kMissingLabelMarker = "?";

struct LabeledDataset {
  PointMatrix predictors;
  std::vector<int> labels;  // 0-based codes, kMissingLabel for "?"
  std::vector<std::string> label_dictionary;
  std::vector<std::string> feature_names;
  std::string label_column = "label";

  std::size_t size() const noexcept { return predictors.rows(); }
  std::size_t dimension() const noexcept { return predictors.cols(); }
  int num_classes() const noexcept {
    return static_cast<int>(label_dictionary.size());
  }
};

// Reads a comma-separated file with a header row. Every column other than
// `label_column` must be numeric. Labels are coded in order of first
// appearance, continuing `dictionary` when one is given so that codes stay
// stable across files. With `label_optional`, a file without the label
// column loads with every label missing.
LabeledDataset load_csv(const std::filesystem::path& path,
                        const std::string& label_column,
                        std::vector<std::string> dictionary = {},
                        bool label_optional = false);
LabeledDataset read_csv(std::istream& in, const std::string& label_column,
                        std::vector<std::string> dictionary = {},
                        bool label_optional = false);

// Writes predictors with 17 significant digits, label column last.
void write_csv(std::ostream& out, const LabeledDataset& data);
void write_csv(const std::filesystem::path& path, const LabeledDataset& data);

LabeledDataset subset(const LabeledDataset& data, std::span<const int> rows);

// Uniform points in [0,1]^3; label "1" inside [0,0.25]^3 or [0.25,1]^3,
// label "2" elsewhere; then centered and rotated by R_y(-pi/4) R_x(pi/4).
LabeledDataset mondrian_cube(std::size_t n, Rng& rng);
// The rotation applied after centering, exposed for tests.
std::array<double, 3> mondrian_cube_rotate(std::array<double, 3> p);
int mondrian_cube_label(std::array<double, 3> unit_cube_point);

// Synthetic principal-component-score-shaped table: independent centered
// Gaussian columns with geometrically decaying spread, two classes whose
// separation lives in a few leading columns.
LabeledDataset synthetic_pc_scores(std::size_t rows, std::size_t cols,
                                   std::size_t minority, Rng& rng);

struct SplitSpec {
  double train_fraction = 0.6;
  int replicate = 0;
  std::uint64_t seed = 0;
};

struct Split {
  std::vector<int> train;
  std::vector<int> test;
};

// Uniform random partition with round(fraction * n) training rows (half up).
Split split(std::size_t n, double train_fraction, Rng& rng);
// Replicate r of a seeded series of splits.
Split split(std::size_t n, const SplitSpec& spec);

// Per-column mean and sample standard deviation of selected rows.
class Standardizer {
 public:
  static Standardizer fit(const LabeledDataset& data, std::span<const int> rows);
  static Standardizer identity(std::size_t dimension);
  Standardizer(std::vector<double> means, std::vector<double> sds);

  PointMatrix apply(const PointMatrix& points) const;
  const std::vector<double>& means() const noexcept { return means_; }
  const std::vector<double>& sds() const noexcept { return sds_; }

 private:
  std::vector<double> means_;
  std::vector<double> sds_;
};

// Sample variance of each column over the selected rows.
std::vector<double> column_variances(const PointMatrix& points,
                                     std::span<const int> rows);

// Training rows (labeled) followed by test rows (unlabeled), ready to be
// tessellated. Test rows are at indices [train.size(), train.size()+test.size()).
struct AugmentedData {
  std::shared_ptr<const PointData> data;
  std::vector<int> test_rows;
};

AugmentedData augment(const PointMatrix& train_points,
                      std::span<const int> train_labels, int num_classes,
                      const PointMatrix& test_points);

}  // namespace rtp
