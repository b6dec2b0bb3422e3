#include "rtp/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "rtp/errors.hpp"

namespace rtp {

namespace {

constexpr std::uint64_t kTreeStream = 0x7EE;
constexpr int kManifestVersion = 1;

nlohmann::json budget_to_json(double budget) {
  if (std::isinf(budget)) return "inf";
  return budget;
}

double budget_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw DataError(DataErrorKind::kOther, "manifest: bad budget");
  }
  return j.get<double>();
}

std::string tree_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "tree_%03zu.cutlog", index);
  return buf;
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kURTF: return "urtf";
    case Variant::kWURTF: return "wurtf";
    case Variant::kMRTF: return "mrtf";
    case Variant::kWMRTF: return "wmrtf";
    case Variant::kURTFI: return "urtf-i";
    case Variant::kMRTFI: return "mrtf-i";
  }
  return "?";
}

std::string_view display_name(Variant v) {
  switch (v) {
    case Variant::kURTF: return "uRTF";
    case Variant::kWURTF: return "wuRTF";
    case Variant::kMRTF: return "MRTF";
    case Variant::kWMRTF: return "wMRTF";
    case Variant::kURTFI: return "uRTF.i";
    case Variant::kMRTFI: return "MRTF.i";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : kAllVariants) {
    if (name == to_string(v) || name == display_name(v)) return v;
  }
  throw UsageError("unknown variant '" + std::string(name) +
                   "' (expected urtf, wurtf, mrtf, wmrtf, urtf-i or mrtf-i)");
}

MeasureKind measure_kind(Variant v) {
  switch (v) {
    case Variant::kURTF:
    case Variant::kURTFI: return MeasureKind::kUniform;
    case Variant::kWURTF: return MeasureKind::kWeightedUniform;
    case Variant::kMRTF:
    case Variant::kMRTFI: return MeasureKind::kMondrian;
    case Variant::kWMRTF: return MeasureKind::kWeightedMondrian;
  }
  return MeasureKind::kUniform;
}

bool is_weighted(Variant v) {
  return v == Variant::kWURTF || v == Variant::kWMRTF;
}

bool uses_likelihood(Variant v) {
  return v != Variant::kURTFI && v != Variant::kMRTFI;
}

std::uint64_t tree_seed(std::uint64_t forest_seed, std::size_t tree_index) {
  return derive_seed(forest_seed, kTreeStream, tree_index);
}

SmcConfig make_smc_config(const ForestConfig& config, std::size_t dimension,
                          std::size_t tree_index) {
  SmcConfig smc;
  smc.particles = config.particles;
  smc.budget = config.budget;
  smc.measure = RtpMeasure(measure_kind(config.variant), dimension,
                           is_weighted(config.variant) ? config.weights
                                                       : std::vector<double>{});
  smc.rate_mode = config.rate_mode;
  smc.alpha = config.alpha;
  smc.likelihood_weighting = uses_likelihood(config.variant);
  smc.seed = tree_seed(config.seed, tree_index);
  smc.max_cuts = config.max_cuts;
  return smc;
}

Forest fit_forest(std::shared_ptr<const PointData> data,
                  const ForestConfig& config) {
  if (!data) throw UsageError("fit_forest: no data");
  if (config.trees < 1) throw UsageError("a forest needs at least one tree");
  if (!data->labeled()) throw UsageError("forests need labeled training data");

  Forest forest;
  forest.config = config;
  forest.num_classes = data->num_classes;
  forest.alpha = config.alpha.empty()
                     ? empirical_alpha(data->labels, data->num_classes)
                     : config.alpha;
  validate_alpha(forest.alpha);
  forest.config.alpha = forest.alpha;

  const std::size_t T = static_cast<std::size_t>(config.trees);
  std::vector<std::optional<TreeFit>> fits(T);
  // Validate the measure once up front so workers never throw on config.
  (void)make_smc_config(forest.config, data->points.cols(), 0);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t t = next.fetch_add(1);
      if (t >= T) return;
      try {
        const SmcConfig smc = make_smc_config(forest.config, data->points.cols(), t);
        PosteriorEstimate est = run_smc(data, smc);
        fits[t].emplace(TreeFit{smc.seed, est.best(), est.weights[est.selected]});
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(T);
      }
    }
  };
  const int threads = std::max(1, std::min<int>(config.threads, static_cast<int>(T)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  forest.trees.reserve(T);
  for (auto& f : fits) forest.trees.push_back(std::move(*f));
  return forest;
}

int modal_label(std::span<const int> votes) {
  int best = 0;
  for (std::size_t k = 1; k < votes.size(); ++k) {
    if (votes[k] > votes[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
  }
  return best;
}

ForestPrediction predict_forest(const Forest& forest, std::span<const int> rows,
                                VoteMode mode) {
  const std::size_t K = static_cast<std::size_t>(forest.num_classes);
  ForestPrediction out;
  out.votes.assign(rows.size(), std::vector<int>(K, 0));
  std::vector<std::vector<double>> prob_sum(rows.size(), std::vector<double>(K, 0.0));
  for (const TreeFit& tree : forest.trees) {
    const Prediction p = predict(tree.tessellation, forest.alpha, rows);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      ++out.votes[i][static_cast<std::size_t>(p.labels[i])];
      for (std::size_t k = 0; k < K; ++k) prob_sum[i][k] += p.probabilities[i][k];
    }
  }
  const double T = static_cast<double>(forest.trees.size());
  out.labels.resize(rows.size());
  out.fractions.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.fractions[i].resize(K);
    for (std::size_t k = 0; k < K; ++k) {
      out.fractions[i][k] = mode == VoteMode::kHardVote ? out.votes[i][k] / T
                                                        : prob_sum[i][k] / T;
    }
    out.labels[i] = mode == VoteMode::kHardVote
                        ? modal_label(out.votes[i])
                        : static_cast<int>(argmax_lowest(out.fractions[i]));
  }
  return out;
}

void save_forest(const std::filesystem::path& dir, const Forest& forest,
                 const nlohmann::json& metadata) {
  std::filesystem::create_directories(dir);
  const ForestConfig& c = forest.config;
  nlohmann::json m;
  m["format"] = "random-tessellation-forest";
  m["version"] = kManifestVersion;
  m["variant"] = std::string(to_string(c.variant));
  m["trees"] = c.trees;
  m["particles"] = c.particles;
  m["budget"] = budget_to_json(c.budget);
  m["rate_mode"] = c.rate_mode ? nlohmann::json(std::string(to_string(*c.rate_mode)))
                               : nlohmann::json(nullptr);
  m["alpha"] = forest.alpha;
  m["weights"] = c.weights;
  m["seed"] = c.seed;
  m["max_cuts"] = c.max_cuts ? nlohmann::json(*c.max_cuts) : nlohmann::json(nullptr);
  m["num_classes"] = forest.num_classes;
  nlohmann::json trees = nlohmann::json::array();
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    const TreeFit& fit = forest.trees[t];
    const std::string file = tree_file_name(t);
    trees.push_back({{"file", file}, {"seed", fit.seed}, {"weight", fit.weight}});
    std::ofstream out(dir / file, std::ios::binary);
    if (!out) throw DataError(DataErrorKind::kOther, "cannot write " + (dir / file).string());
    const auto log = fit.tessellation.cut_log();
    write_cut_log(out, log);
  }
  m["tree_files"] = trees;
  m["metadata"] = metadata;
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw DataError(DataErrorKind::kOther, "cannot write manifest");
  out << m.dump(2) << '\n';
}

nlohmann::json read_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) {
    throw UsageError("no model at '" + dir.string() +
                     "' (manifest.json missing); run fit first");
  }
  nlohmann::json m;
  try {
    in >> m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(DataErrorKind::kOther, std::string("manifest: ") + e.what());
  }
  if (m.value("format", "") != "random-tessellation-forest") {
    throw DataError(DataErrorKind::kOther, "manifest: unknown format");
  }
  return m;
}

Forest load_forest(const std::filesystem::path& dir,
                   std::shared_ptr<const PointData> data) {
  const nlohmann::json m = read_manifest(dir);
  Forest forest;
  try {
    ForestConfig& c = forest.config;
    c.variant = parse_variant(m.at("variant").get<std::string>());
    c.trees = m.at("trees").get<int>();
    c.particles = m.at("particles").get<int>();
    c.budget = budget_from_json(m.at("budget"));
    if (!m.at("rate_mode").is_null()) {
      c.rate_mode = parse_rate_mode(m.at("rate_mode").get<std::string>());
    }
    c.alpha = m.at("alpha").get<std::vector<double>>();
    c.weights = m.at("weights").get<std::vector<double>>();
    c.seed = m.at("seed").get<std::uint64_t>();
    if (!m.at("max_cuts").is_null()) c.max_cuts = m.at("max_cuts").get<int>();
    forest.alpha = c.alpha;
    forest.num_classes = m.at("num_classes").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(DataErrorKind::kOther, std::string("manifest: ") + e.what());
  }
  if (data->num_classes != forest.num_classes) {
    throw DataError(DataErrorKind::kOther, "model and data disagree on class count");
  }
  const std::size_t d = data->points.cols();
  const RtpMeasure measure(measure_kind(forest.config.variant), d,
                           is_weighted(forest.config.variant) ? forest.config.weights
                                                              : std::vector<double>{});
  TessellationOptions opts;
  opts.budget = forest.config.budget;
  opts.rate_mode = forest.config.rate_mode.value_or(measure.default_rate_mode());
  for (const auto& entry : m.at("tree_files")) {
    const auto file = dir / entry.at("file").get<std::string>();
    std::ifstream in(file);
    if (!in) throw DataError(DataErrorKind::kOther, "missing tree file " + file.string());
    const auto log = read_cut_log(in);
    forest.trees.push_back(TreeFit{entry.at("seed").get<std::uint64_t>(),
                                   Tessellation::replay(data, measure, opts, log),
                                   entry.at("weight").get<double>()});
  }
  return forest;
}

}  // namespace rtp
