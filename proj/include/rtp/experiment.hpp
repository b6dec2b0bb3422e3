#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "rtp/data.hpp"
#include "rtp/forest.hpp"

namespace rtp {

using ProgressFn = std::function<void(const std::string&)>;

// A forest variant run with a given number of trees. Single-tree methods
// report under the process name (uRTP, MRTP, ...).
struct Method {
  Variant variant = Variant::kURTF;
  int trees = 10;
  std::string name() const;
};

// Accepts forest spellings (urtf, mrtf-i, ...) and process spellings (urtp,
// mrtp, wurtp, wmrtp), the latter meaning one tree.
Method parse_method(std::string_view text, int default_trees);

// --- Mondrian cube ---------------------------------------------------------

struct CubeConfig {
  std::size_t n = 2000;
  int splits = 20;
  std::vector<Method> methods{{Variant::kURTF, 10}, {Variant::kMRTF, 10}};
  int particles = 20;
  std::vector<int> cuts;  // accuracy checkpoints; 0..150 when empty
  double train_fraction = 0.6;
  std::optional<RateMode> rate_mode;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct CubeReport {
  CubeConfig config;
  std::vector<int> cuts;
  // accuracy[method][split][checkpoint], percent correct
  std::vector<std::vector<std::vector<double>>> accuracy;
  std::vector<double> seconds;  // per method

  std::vector<double> mean_curve(std::size_t method) const;
};

CubeReport run_cube_experiment(const CubeConfig& config,
                               const ProgressFn& progress = {});

// Percent correct of a T-tree forest's hard vote on the test rows at every
// cut checkpoint, from one SMC run per tree.
std::vector<double> forest_accuracy_curve(
    const std::shared_ptr<const PointData>& data, const ForestConfig& config,
    std::span<const int> test_rows, std::span<const int> test_labels,
    std::span<const int> checkpoints);

nlohmann::json to_json(const CubeReport& report);
void write_cube_csv(std::ostream& out, const CubeReport& report);

// --- Table 1 protocol ------------------------------------------------------

struct DatasetSpec {
  std::string name;
  std::filesystem::path path;
  std::string label_column = "label";
  std::optional<std::filesystem::path> baselines;  // split,method,accuracy
};

struct ExperimentConfig {
  std::vector<DatasetSpec> datasets;
  std::vector<Variant> methods{std::begin(kAllVariants), std::end(kAllVariants)};
  int splits = 200;
  int trees = 100;
  int particles = 20;
  double train_fraction = 0.6;
  double budget = std::numeric_limits<double>::infinity();
  std::optional<RateMode> rate_mode;
  std::optional<int> max_cuts;
  bool standardize = true;
  std::uint64_t seed = 0;
  int threads = 1;
  std::optional<std::filesystem::path> export_splits;  // directory
};

// Reads a JSON config; relative paths resolve against `base_dir`.
ExperimentConfig parse_experiment_config(const nlohmann::json& j,
                                         const std::filesystem::path& base_dir);

struct MethodColumn {
  std::string name;
  bool external = false;
  std::optional<std::vector<double>> accuracy;  // per split; null if absent
  double seconds = 0.0;
};

struct SignTest {
  std::string a;
  std::string b;
  int wins = 0;
  int losses = 0;
  int ties = 0;
  double p = 1.0;  // one-sided, a better than b, ties count against a
};

struct DatasetReport {
  std::string name;
  std::size_t rows = 0;
  std::size_t columns = 0;
  int classes = 0;
  std::vector<MethodColumn> methods;  // BL, LR, SVM, RF, then forests
  std::string top;
  std::vector<SignTest> top_vs_others;
  std::vector<std::vector<std::optional<double>>> pairwise;  // p[a][b]
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<DatasetReport> datasets;
};

// Runs splits x methods on every dataset: standardization with training
// statistics, weights from training variances, empirical alpha, and
// conservative sign tests.
ExperimentReport run_experiment(const ExperimentConfig& config,
                                const ProgressFn& progress = {});

SignTest sign_test(const std::string& a, std::span<const double> acc_a,
                   const std::string& b, std::span<const double> acc_b);

// Percent correct of always predicting the training mode.
double baseline_accuracy(std::span<const int> train_labels,
                         std::span<const int> test_labels, int num_classes);

nlohmann::json to_json(const ExperimentReport& report);
nlohmann::json runtime_json(const ExperimentReport& report);
void write_experiment_csv(std::ostream& out, const ExperimentReport& report);

// split,method,accuracy rows for the external methods.
std::vector<std::pair<std::string, std::vector<double>>> read_baselines(
    const std::filesystem::path& path, int splits);

}  // namespace rtp
