#include "rtp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "rtp/errors.hpp"
#include "rtp/stats.hpp"

namespace rtp {

namespace {

constexpr std::uint64_t kCubeDataStream = 0xC0BE;
constexpr std::uint64_t kCubeForestStream = 0xC0BE5;
constexpr std::uint64_t kTableForestStream = 0x7AB1E;

const char* const kExternalMethods[] = {"LR", "SVM", "RF"};
constexpr Variant kTableOrder[] = {Variant::kMRTFI, Variant::kURTFI, Variant::kMRTF,
                                   Variant::kURTF,  Variant::kWMRTF, Variant::kWURTF};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

PointMatrix rows_of(const PointMatrix& points, std::span<const int> rows) {
  PointMatrix out(0, points.cols());
  for (int r : rows) out.append_row(points.row(static_cast<std::size_t>(r)));
  return out;
}

std::vector<int> labels_of(std::span<const int> labels, std::span<const int> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (int r : rows) out.push_back(labels[static_cast<std::size_t>(r)]);
  return out;
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Runs `body(i)` for i in [0, count) on up to `threads` workers.
template <typename Body>
void parallel_for(std::size_t count, int threads, Body body) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

nlohmann::json budget_json(double budget) {
  if (std::isinf(budget)) return "inf";
  return budget;
}

}  // namespace

std::string Method::name() const {
  if (trees != 1) return std::string(display_name(variant));
  switch (variant) {
    case Variant::kURTF: return "uRTP";
    case Variant::kWURTF: return "wuRTP";
    case Variant::kMRTF: return "MRTP";
    case Variant::kWMRTF: return "wMRTP";
    case Variant::kURTFI: return "uRTP.i";
    case Variant::kMRTFI: return "MRTP.i";
  }
  return "?";
}

Method parse_method(std::string_view text, int default_trees) {
  static const std::pair<std::string_view, Variant> kSingle[] = {
      {"urtp", Variant::kURTF},     {"wurtp", Variant::kWURTF},
      {"mrtp", Variant::kMRTF},     {"wmrtp", Variant::kWMRTF},
      {"urtp-i", Variant::kURTFI},  {"mrtp-i", Variant::kMRTFI},
      {"uRTP", Variant::kURTF},     {"wuRTP", Variant::kWURTF},
      {"MRTP", Variant::kMRTF},     {"wMRTP", Variant::kWMRTF},
  };
  for (const auto& [name, v] : kSingle) {
    if (text == name) return Method{v, 1};
  }
  return Method{parse_variant(text), default_trees};
}

// --- accuracy curves -------------------------------------------------------

std::vector<double> forest_accuracy_curve(
    const std::shared_ptr<const PointData>& data, const ForestConfig& config,
    std::span<const int> test_rows, std::span<const int> test_labels,
    std::span<const int> checkpoints) {
  if (test_rows.size() != test_labels.size()) {
    throw UsageError("test rows and labels differ in length");
  }
  if (test_rows.empty()) throw UsageError("accuracy needs test rows");
  if (checkpoints.empty()) throw UsageError("accuracy needs checkpoints");
  for (int c : checkpoints) {
    if (c < 0) throw UsageError("cut checkpoints must be >= 0");
  }
  const std::size_t T = static_cast<std::size_t>(config.trees);
  const std::size_t P = checkpoints.size();
  const std::size_t K = static_cast<std::size_t>(data->num_classes);
  const std::vector<double> alpha =
      config.alpha.empty() ? empirical_alpha(data->labels, data->num_classes)
                           : config.alpha;
  ForestConfig base = config;
  base.alpha = alpha;
  const int last = *std::max_element(checkpoints.begin(), checkpoints.end());

  // tree_labels[t][p] = hard labels of tree t at checkpoint p
  std::vector<std::vector<std::vector<int>>> tree_labels(T);
  parallel_for(T, config.threads, [&](std::size_t t) {
    SmcConfig smc = make_smc_config(base, data->points.cols(), t);
    smc.max_cuts = config.max_cuts ? std::min(*config.max_cuts, last) : last;
    auto& out = tree_labels[t];
    out.assign(P, {});
    auto record = [&](int iteration, const Tessellation& tess) {
      std::vector<int> labels;
      for (std::size_t p = 0; p < P; ++p) {
        if (checkpoints[p] != iteration) continue;
        if (labels.empty()) labels = predict(tess, alpha, test_rows).labels;
        out[p] = labels;
      }
    };
    {
      TessellationOptions opts;
      opts.budget = smc.budget;
      opts.rate_mode = smc.rate_mode.value_or(smc.measure.default_rate_mode());
      record(0, Tessellation(data, smc.measure, opts));
    }
    const PosteriorEstimate est = run_smc(
        data, smc,
        [&](int iteration, std::span<const Particle> particles,
            std::span<const double> weights) {
          record(iteration, particles[argmax_lowest(weights)].tessellation);
        });
    std::vector<int> final_labels;
    for (std::size_t p = 0; p < P; ++p) {
      if (!out[p].empty()) continue;
      if (final_labels.empty()) final_labels = predict(est, test_rows).labels;
      out[p] = final_labels;
    }
  });

  std::vector<double> accuracy(P);
  std::vector<int> votes(K);
  for (std::size_t p = 0; p < P; ++p) {
    int correct = 0;
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      std::fill(votes.begin(), votes.end(), 0);
      for (std::size_t t = 0; t < T; ++t) {
        ++votes[static_cast<std::size_t>(tree_labels[t][p][i])];
      }
      if (modal_label(votes) == test_labels[i]) ++correct;
    }
    accuracy[p] = 100.0 * correct / static_cast<double>(test_rows.size());
  }
  return accuracy;
}

// --- Mondrian cube ---------------------------------------------------------

std::vector<double> CubeReport::mean_curve(std::size_t method) const {
  std::vector<double> out(cuts.size(), 0.0);
  const auto& per_split = accuracy.at(method);
  for (const auto& curve : per_split) {
    for (std::size_t p = 0; p < cuts.size(); ++p) out[p] += curve[p];
  }
  for (double& x : out) x /= static_cast<double>(per_split.size());
  return out;
}

CubeReport run_cube_experiment(const CubeConfig& config, const ProgressFn& progress) {
  if (config.n < 5) throw UsageError("cube: n must be >= 5");
  if (config.splits < 1) throw UsageError("cube: need at least one split");
  if (config.methods.empty()) throw UsageError("cube: no methods");
  if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) {
    throw UsageError("train fraction must lie in (0, 1)");
  }
  CubeReport report;
  report.config = config;
  if (config.cuts.empty()) {
    for (int c = 0; c <= 150; ++c) report.cuts.push_back(c);
  } else {
    report.cuts = config.cuts;
  }
  Rng data_rng = make_rng(config.seed, kCubeDataStream);
  const LabeledDataset cube = mondrian_cube(config.n, data_rng);

  const std::size_t S = static_cast<std::size_t>(config.splits);
  report.accuracy.assign(config.methods.size(),
                         std::vector<std::vector<double>>(S));
  report.seconds.assign(config.methods.size(), 0.0);

  for (std::size_t s = 0; s < S; ++s) {
    const Split sp = split(cube.size(), SplitSpec{config.train_fraction,
                                                  static_cast<int>(s), config.seed});
    const PointMatrix train = rows_of(cube.predictors, sp.train);
    const PointMatrix test = rows_of(cube.predictors, sp.test);
    const auto train_labels = labels_of(cube.labels, sp.train);
    const auto test_labels = labels_of(cube.labels, sp.test);
    const AugmentedData aug = augment(train, train_labels, cube.num_classes(), test);
    std::vector<int> all_train(sp.train.size());
    std::iota(all_train.begin(), all_train.end(), 0);
    const auto variances = column_variances(train, all_train);

    for (std::size_t m = 0; m < config.methods.size(); ++m) {
      const Method& method = config.methods[m];
      ForestConfig fc;
      fc.variant = method.variant;
      fc.trees = method.trees;
      fc.particles = config.particles;
      fc.rate_mode = config.rate_mode;
      if (is_weighted(method.variant)) fc.weights = variances;
      fc.seed = derive_seed(config.seed, kCubeForestStream,
                            static_cast<std::uint64_t>(method.variant), s);
      fc.threads = config.threads;
      const auto start = Clock::now();
      report.accuracy[m][s] =
          forest_accuracy_curve(aug.data, fc, aug.test_rows, test_labels, report.cuts);
      report.seconds[m] += seconds_since(start);
      if (progress) {
        std::ostringstream msg;
        msg << "split " << s + 1 << '/' << S << ' ' << method.name() << ": "
            << report.accuracy[m][s].back() << "% at " << report.cuts.back()
            << " cuts";
        progress(msg.str());
      }
    }
  }
  return report;
}

nlohmann::json to_json(const CubeReport& report) {
  const CubeConfig& c = report.config;
  nlohmann::json j;
  j["experiment"] = "mondrian-cube";
  j["n"] = c.n;
  j["splits"] = c.splits;
  j["particles"] = c.particles;
  j["train_fraction"] = c.train_fraction;
  j["rate_mode"] = c.rate_mode ? nlohmann::json(std::string(to_string(*c.rate_mode)))
                               : nlohmann::json("default");
  j["seed"] = c.seed;
  j["cuts"] = report.cuts;
  nlohmann::json methods = nlohmann::json::array();
  for (std::size_t m = 0; m < c.methods.size(); ++m) {
    methods.push_back({{"name", c.methods[m].name()},
                       {"variant", std::string(to_string(c.methods[m].variant))},
                       {"trees", c.methods[m].trees},
                       {"mean", report.mean_curve(m)},
                       {"per_split", report.accuracy[m]}});
  }
  j["methods"] = methods;
  nlohmann::json tests = nlohmann::json::array();
  const std::size_t last = report.cuts.size() - 1;
  for (std::size_t a = 0; a < c.methods.size(); ++a) {
    for (std::size_t b = 0; b < c.methods.size(); ++b) {
      if (a == b) continue;
      std::vector<double> xa, xb;
      for (const auto& curve : report.accuracy[a]) xa.push_back(curve[last]);
      for (const auto& curve : report.accuracy[b]) xb.push_back(curve[last]);
      const SignTest t = sign_test(c.methods[a].name(), xa, c.methods[b].name(), xb);
      tests.push_back({{"a", t.a}, {"b", t.b}, {"cuts", report.cuts[last]},
                       {"wins", t.wins}, {"losses", t.losses}, {"ties", t.ties},
                       {"p", t.p}});
    }
  }
  j["sign_tests"] = tests;
  return j;
}

void write_cube_csv(std::ostream& out, const CubeReport& report) {
  out << "method,split,cuts,accuracy\n";
  for (std::size_t m = 0; m < report.config.methods.size(); ++m) {
    const std::string name = report.config.methods[m].name();
    for (std::size_t s = 0; s < report.accuracy[m].size(); ++s) {
      for (std::size_t p = 0; p < report.cuts.size(); ++p) {
        out << name << ',' << s << ',' << report.cuts[p] << ','
            << nlohmann::json(report.accuracy[m][s][p]).dump() << '\n';
      }
    }
  }
}

// --- Table 1 protocol ------------------------------------------------------

SignTest sign_test(const std::string& a, std::span<const double> acc_a,
                   const std::string& b, std::span<const double> acc_b) {
  if (acc_a.size() != acc_b.size()) throw UsageError("sign test: split counts differ");
  SignTest t{a, b};
  for (std::size_t i = 0; i < acc_a.size(); ++i) {
    if (acc_a[i] > acc_b[i]) {
      ++t.wins;
    } else if (acc_a[i] < acc_b[i]) {
      ++t.losses;
    } else {
      ++t.ties;
    }
  }
  t.p = stats::sign_test_pvalue(t.wins, t.losses, t.ties);
  return t;
}

double baseline_accuracy(std::span<const int> train_labels,
                         std::span<const int> test_labels, int num_classes) {
  if (test_labels.empty()) throw UsageError("baseline: no test rows");
  std::vector<int> counts(static_cast<std::size_t>(num_classes), 0);
  for (int z : train_labels) {
    if (z >= 0) ++counts[static_cast<std::size_t>(z)];
  }
  const int mode = modal_label(counts);
  const auto correct = std::count(test_labels.begin(), test_labels.end(), mode);
  return 100.0 * static_cast<double>(correct) / static_cast<double>(test_labels.size());
}

std::vector<std::pair<std::string, std::vector<double>>> read_baselines(
    const std::filesystem::path& path, int splits) {
  std::ifstream in(path);
  if (!in) throw DataError(DataErrorKind::kEmptyFile, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(DataErrorKind::kEmptyFile, path.string() + " is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "split,method,accuracy") {
    throw DataError(DataErrorKind::kOther,
                    path.string() + ": expected header split,method,accuracy");
  }
  std::map<std::string, std::vector<std::optional<double>>> by_method;
  std::vector<std::string> order;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string s, method, acc;
    if (!std::getline(fields, s, ',') || !std::getline(fields, method, ',') ||
        !std::getline(fields, acc)) {
      throw DataError(DataErrorKind::kRaggedRow,
                      path.string() + ":" + std::to_string(line_no) + ": expected 3 fields");
    }
    int split_index = 0;
    double value = 0.0;
    try {
      std::size_t used = 0;
      split_index = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      value = std::stod(acc, &used);
      if (used != acc.size()) throw std::invalid_argument(acc);
    } catch (const std::exception&) {
      throw DataError(DataErrorKind::kNonNumericCell,
                      path.string() + ":" + std::to_string(line_no) + ": bad number");
    }
    if (split_index < 0 || split_index >= splits) continue;
    auto [it, inserted] = by_method.try_emplace(
        method, std::vector<std::optional<double>>(static_cast<std::size_t>(splits)));
    if (inserted) order.push_back(method);
    it->second[static_cast<std::size_t>(split_index)] = value;
  }
  std::vector<std::pair<std::string, std::vector<double>>> out;
  for (const auto& name : order) {
    std::vector<double> values;
    for (std::size_t s = 0; s < by_method[name].size(); ++s) {
      if (!by_method[name][s]) {
        throw DataError(DataErrorKind::kOther, path.string() + ": method " + name +
                                                   " lacks split " + std::to_string(s));
      }
      values.push_back(*by_method[name][s]);
    }
    out.emplace_back(name, std::move(values));
  }
  return out;
}

ExperimentConfig parse_experiment_config(const nlohmann::json& j,
                                         const std::filesystem::path& base_dir) {
  static const std::set<std::string> kKeys = {
      "datasets", "methods",  "splits",    "trees",       "particles",
      "train_fraction", "budget", "rate_mode", "max_cuts", "standardize",
      "seed",     "threads",  "export_splits"};
  if (!j.is_object()) throw UsageError("experiment config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kKeys.count(key)) throw UsageError("experiment config: unknown key '" + key + "'");
  }
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  ExperimentConfig c;
  try {
    if (!j.contains("datasets") || !j["datasets"].is_array() || j["datasets"].empty()) {
      throw UsageError("experiment config: 'datasets' must be a non-empty list");
    }
    for (const auto& d : j["datasets"]) {
      DatasetSpec spec;
      spec.path = resolve(d.at("path").get<std::string>());
      spec.name = d.value("name", spec.path.stem().string());
      spec.label_column = d.value("label_column", std::string("label"));
      if (d.contains("baselines") && !d["baselines"].is_null()) {
        spec.baselines = resolve(d["baselines"].get<std::string>());
      }
      c.datasets.push_back(std::move(spec));
    }
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j["methods"]) c.methods.push_back(parse_variant(m.get<std::string>()));
      if (c.methods.empty()) throw UsageError("experiment config: no methods");
    }
    c.splits = j.value("splits", c.splits);
    c.trees = j.value("trees", c.trees);
    c.particles = j.value("particles", c.particles);
    c.train_fraction = j.value("train_fraction", c.train_fraction);
    if (j.contains("budget")) {
      const auto& b = j["budget"];
      if (b.is_string() && b.get<std::string>() == "inf") {
        c.budget = std::numeric_limits<double>::infinity();
      } else {
        c.budget = b.get<double>();
      }
    }
    if (j.contains("rate_mode") && !j["rate_mode"].is_null()) {
      c.rate_mode = parse_rate_mode(j["rate_mode"].get<std::string>());
    }
    if (j.contains("max_cuts") && !j["max_cuts"].is_null()) {
      c.max_cuts = j["max_cuts"].get<int>();
    }
    c.standardize = j.value("standardize", c.standardize);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    if (j.contains("export_splits") && !j["export_splits"].is_null()) {
      c.export_splits = resolve(j["export_splits"].get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("experiment config: ") + e.what());
  }
  if (c.splits < 1) throw UsageError("experiment config: splits must be >= 1");
  if (c.trees < 1) throw UsageError("experiment config: trees must be >= 1");
  if (c.particles < 1) throw UsageError("experiment config: particles must be >= 1");
  if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0)) {
    throw UsageError("experiment config: train_fraction must lie in (0, 1)");
  }
  if (!(c.budget > 0.0)) throw UsageError("experiment config: budget must be > 0");
  return c;
}

namespace {

DatasetReport run_dataset(const ExperimentConfig& config, const DatasetSpec& spec,
                          const ProgressFn& progress) {
  const LabeledDataset data = load_csv(spec.path, spec.label_column);
  if (std::count(data.labels.begin(), data.labels.end(), kMissingLabel) > 0) {
    throw DataError(DataErrorKind::kOther,
                    spec.name + ": experiment datasets must be fully labeled");
  }
  const int K = data.num_classes();
  const std::size_t S = static_cast<std::size_t>(config.splits);

  std::vector<Variant> forests;
  for (Variant v : kTableOrder) {
    if (std::find(config.methods.begin(), config.methods.end(), v) != config.methods.end()) {
      forests.push_back(v);
    }
  }

  std::vector<double> bl(S);
  std::vector<std::vector<double>> acc(forests.size(), std::vector<double>(S));
  std::vector<double> secs(forests.size(), 0.0);
  std::ofstream split_out;
  if (config.export_splits) {
    std::filesystem::create_directories(*config.export_splits);
    split_out.open(*config.export_splits / (spec.name + "_splits.csv"));
    if (!split_out) throw DataError(DataErrorKind::kOther, "cannot write split export");
    split_out << "split,row,set\n";
  }

  for (std::size_t s = 0; s < S; ++s) {
    const Split sp = split(data.size(), SplitSpec{config.train_fraction,
                                                  static_cast<int>(s), config.seed});
    if (sp.train.empty() || sp.test.empty()) {
      throw DataError(DataErrorKind::kOther, spec.name + ": split leaves an empty side");
    }
    if (split_out) {
      for (int r : sp.train) split_out << s << ',' << r << ",train\n";
      for (int r : sp.test) split_out << s << ',' << r << ",test\n";
    }
    const auto train_labels = labels_of(data.labels, sp.train);
    const auto test_labels = labels_of(data.labels, sp.test);
    bl[s] = baseline_accuracy(train_labels, test_labels, K);

    const Standardizer scaler = config.standardize
                                    ? Standardizer::fit(data, sp.train)
                                    : Standardizer::identity(data.dimension());
    const PointMatrix scaled = scaler.apply(data.predictors);
    const auto variances = column_variances(data.predictors, sp.train);
    const AugmentedData aug = augment(rows_of(scaled, sp.train), train_labels, K,
                                      rows_of(scaled, sp.test));

    for (std::size_t m = 0; m < forests.size(); ++m) {
      ForestConfig fc;
      fc.variant = forests[m];
      fc.trees = config.trees;
      fc.particles = config.particles;
      fc.budget = config.budget;
      fc.rate_mode = config.rate_mode;
      fc.max_cuts = config.max_cuts;
      if (is_weighted(fc.variant)) fc.weights = variances;
      fc.seed = derive_seed(config.seed, kTableForestStream,
                            static_cast<std::uint64_t>(fc.variant), s);
      fc.threads = config.threads;
      const auto start = Clock::now();
      const Forest forest = fit_forest(aug.data, fc);
      const ForestPrediction pred = predict_forest(forest, aug.test_rows);
      secs[m] += seconds_since(start);
      int correct = 0;
      for (std::size_t i = 0; i < test_labels.size(); ++i) {
        if (pred.labels[i] == test_labels[i]) ++correct;
      }
      acc[m][s] = 100.0 * correct / static_cast<double>(test_labels.size());
    }
    if (progress) {
      std::ostringstream msg;
      msg << spec.name << ": split " << s + 1 << '/' << S;
      progress(msg.str());
    }
  }

  DatasetReport report;
  report.name = spec.name;
  report.rows = data.size();
  report.columns = data.dimension();
  report.classes = K;
  report.methods.push_back(MethodColumn{"BL", false, bl, 0.0});
  std::vector<std::pair<std::string, std::vector<double>>> external;
  if (spec.baselines) external = read_baselines(*spec.baselines, config.splits);
  for (const char* name : kExternalMethods) {
    MethodColumn col{name, true, std::nullopt, 0.0};
    for (auto& [ename, values] : external) {
      if (ename == name) col.accuracy = values;
    }
    report.methods.push_back(std::move(col));
  }
  for (auto& [ename, values] : external) {
    const bool listed = std::any_of(std::begin(kExternalMethods), std::end(kExternalMethods),
                                    [&](const char* n) { return ename == n; });
    if (!listed) report.methods.push_back(MethodColumn{ename, true, values, 0.0});
  }
  for (std::size_t m = 0; m < forests.size(); ++m) {
    report.methods.push_back(
        MethodColumn{std::string(display_name(forests[m])), false, acc[m], secs[m]});
  }

  std::optional<std::size_t> top;
  for (std::size_t i = 0; i < report.methods.size(); ++i) {
    if (!report.methods[i].accuracy) continue;
    if (!top || mean(*report.methods[i].accuracy) > mean(*report.methods[*top].accuracy)) {
      top = i;
    }
  }
  report.top = report.methods[*top].name;
  const std::size_t C = report.methods.size();
  report.pairwise.assign(C, std::vector<std::optional<double>>(C));
  for (std::size_t a = 0; a < C; ++a) {
    for (std::size_t b = 0; b < C; ++b) {
      const auto& ma = report.methods[a];
      const auto& mb = report.methods[b];
      if (a == b || !ma.accuracy || !mb.accuracy) continue;
      const SignTest t = sign_test(ma.name, *ma.accuracy, mb.name, *mb.accuracy);
      report.pairwise[a][b] = t.p;
      if (a == *top) report.top_vs_others.push_back(t);
    }
  }
  return report;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config,
                                const ProgressFn& progress) {
  if (config.datasets.empty()) throw UsageError("experiment: no datasets");
  ExperimentReport report;
  report.config = config;
  for (const DatasetSpec& spec : config.datasets) {
    report.datasets.push_back(run_dataset(config, spec, progress));
  }
  return report;
}

nlohmann::json to_json(const ExperimentReport& report) {
  const ExperimentConfig& c = report.config;
  nlohmann::json j;
  j["experiment"] = "table1";
  nlohmann::json methods = nlohmann::json::array();
  for (Variant v : c.methods) methods.push_back(std::string(to_string(v)));
  j["protocol"] = {{"splits", c.splits},
                   {"trees", c.trees},
                   {"particles", c.particles},
                   {"train_fraction", c.train_fraction},
                   {"budget", budget_json(c.budget)},
                   {"rate_mode", c.rate_mode ? nlohmann::json(std::string(to_string(*c.rate_mode)))
                                             : nlohmann::json("default")},
                   {"max_cuts", c.max_cuts ? nlohmann::json(*c.max_cuts) : nlohmann::json(nullptr)},
                   {"standardize", c.standardize},
                   {"alpha", "empirical"},
                   {"weights", "training variance"},
                   {"seed", c.seed},
                   {"methods", methods}};
  nlohmann::json datasets = nlohmann::json::array();
  for (const DatasetReport& d : report.datasets) {
    nlohmann::json dj;
    dj["name"] = d.name;
    dj["rows"] = d.rows;
    dj["columns"] = d.columns;
    dj["classes"] = d.classes;
    nlohmann::json cols = nlohmann::json::array();
    nlohmann::json names = nlohmann::json::array();
    for (const MethodColumn& m : d.methods) {
      names.push_back(m.name);
      nlohmann::json mj{{"name", m.name}, {"external", m.external}};
      if (m.accuracy) {
        mj["mean"] = mean(*m.accuracy);
        mj["sd"] = sample_sd(*m.accuracy);
        mj["per_split"] = *m.accuracy;
      } else {
        mj["mean"] = nullptr;
        mj["sd"] = nullptr;
        mj["per_split"] = nullptr;
      }
      cols.push_back(mj);
    }
    dj["methods"] = cols;
    dj["top"] = d.top;
    nlohmann::json tests = nlohmann::json::array();
    nlohmann::json tied = nlohmann::json::array({d.top});
    for (const SignTest& t : d.top_vs_others) {
      tests.push_back({{"a", t.a}, {"b", t.b}, {"wins", t.wins}, {"losses", t.losses},
                       {"ties", t.ties}, {"p", t.p}});
      if (t.p >= 0.05) tied.push_back(t.b);
    }
    dj["sign_tests"] = tests;
    dj["indistinguishable_from_top"] = tied;
    nlohmann::json matrix = nlohmann::json::array();
    for (const auto& row : d.pairwise) {
      nlohmann::json r = nlohmann::json::array();
      for (const auto& p : row) r.push_back(p ? nlohmann::json(*p) : nlohmann::json(nullptr));
      matrix.push_back(r);
    }
    dj["pairwise"] = {{"methods", names}, {"p", matrix}};
    datasets.push_back(dj);
  }
  j["datasets"] = datasets;
  return j;
}

nlohmann::json runtime_json(const ExperimentReport& report) {
  nlohmann::json j;
  nlohmann::json datasets = nlohmann::json::array();
  for (const DatasetReport& d : report.datasets) {
    nlohmann::json secs = nlohmann::json::object();
    for (const MethodColumn& m : d.methods) {
      if (!m.external && m.name != "BL") {
        secs[m.name] = {{"total_seconds", m.seconds},
                        {"mean_seconds_per_split", m.seconds / report.config.splits}};
      }
    }
    datasets.push_back({{"name", d.name}, {"runtime", secs}});
  }
  j["datasets"] = datasets;
  return j;
}

void write_experiment_csv(std::ostream& out, const ExperimentReport& report) {
  out << "dataset,split,method,accuracy\n";
  for (const DatasetReport& d : report.datasets) {
    for (const MethodColumn& m : d.methods) {
      if (!m.accuracy) continue;
      for (std::size_t s = 0; s < m.accuracy->size(); ++s) {
        out << d.name << ',' << s << ',' << m.name << ','
            << nlohmann::json((*m.accuracy)[s]).dump() << '\n';
      }
    }
  }
}

}  // namespace rtp
