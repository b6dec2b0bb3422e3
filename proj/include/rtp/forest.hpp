#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "rtp/smc.hpp"

namespace rtp {

enum class Variant {
  kURTF,
  kWURTF,
  kMRTF,
  kWMRTF,
  kURTFI,  // uRTF.i: likelihood weighting dropped
  kMRTFI,  // MRTF.i
};

std::string_view to_string(Variant v);      // CLI spelling: urtf, urtf-i, ...
std::string_view display_name(Variant v);   // uRTF, uRTF.i, ...
Variant parse_variant(std::string_view name);
MeasureKind measure_kind(Variant v);
bool is_weighted(Variant v);
bool uses_likelihood(Variant v);
inline constexpr Variant kAllVariants[] = {Variant::kURTF,  Variant::kWURTF,
                                           Variant::kMRTF,  Variant::kWMRTF,
                                           Variant::kURTFI, Variant::kMRTFI};

struct ForestConfig {
  Variant variant = Variant::kURTF;
  int trees = 100;
  int particles = 20;
  double budget = std::numeric_limits<double>::infinity();
  std::optional<RateMode> rate_mode;
  std::vector<double> alpha;    // empirical when empty
  std::vector<double> weights;  // required by the weighted variants
  std::uint64_t seed = 0;
  std::optional<int> max_cuts;
  int threads = 1;
};

// Seed of tree t: derive_seed(forest_seed, kTreeStream, t), a splitmix64
// chain over (seed, stream, index).
std::uint64_t tree_seed(std::uint64_t forest_seed, std::size_t tree_index);

// Per-tree SMC configuration (measure from variant, weighting off for .i).
SmcConfig make_smc_config(const ForestConfig& config, std::size_t dimension,
                          std::size_t tree_index);

struct TreeFit {
  std::uint64_t seed = 0;
  Tessellation tessellation;  // the max-weight particle
  double weight = 1.0;
};

struct Forest {
  ForestConfig config;
  std::vector<double> alpha;
  int num_classes = 0;
  std::vector<TreeFit> trees;
};

// T independent SMC runs on the full data (no bagging). Trees are
// distributed over `config.threads` workers; the result does not depend on
// the thread count.
Forest fit_forest(std::shared_ptr<const PointData> data,
                  const ForestConfig& config);

enum class VoteMode { kHardVote, kAverageProbability };

struct ForestPrediction {
  std::vector<int> labels;
  std::vector<std::vector<int>> votes;            // per row, per class
  std::vector<std::vector<double>> fractions;     // vote share or mean prob
};

// Mode of per-tree hard labels (ties to the smallest label), or argmax of
// averaged leaf probabilities.
ForestPrediction predict_forest(const Forest& forest, std::span<const int> rows,
                                VoteMode mode = VoteMode::kHardVote);

// Mode of a vote tally, smallest label on ties.
int modal_label(std::span<const int> votes);

// Model directory: manifest.json plus tree_NNN.cutlog per tree. `metadata`
// is merged into the manifest under "metadata".
void save_forest(const std::filesystem::path& dir, const Forest& forest,
                 const nlohmann::json& metadata = nlohmann::json::object());
nlohmann::json read_manifest(const std::filesystem::path& dir);
// Rebuilds every tree by replaying its cut log on `data`.
Forest load_forest(const std::filesystem::path& dir,
                   std::shared_ptr<const PointData> data);

}  // namespace rtp
