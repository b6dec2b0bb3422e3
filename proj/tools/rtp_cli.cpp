#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rtp/data.hpp"
#include "rtp/errors.hpp"
#include "rtp/experiment.hpp"
#include "rtp/forest.hpp"
#include "rtp/svg.hpp"
#include "rtp/tessellation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(v)) {
      throw rtp::UsageError(what + ": '" + item + "' is not a number");
    }
    out.push_back(v);
  }
  if (out.empty()) throw rtp::UsageError(what + ": empty list");
  return out;
}

double parse_budget(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  const auto v = parse_list(text, "--budget");
  if (v.size() != 1 || !(v[0] > 0.0)) {
    throw rtp::UsageError("--budget must be 'inf' or a positive number");
  }
  return v[0];
}

std::optional<rtp::RateMode> parse_rate(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return rtp::parse_rate_mode(text);
}

std::vector<double> read_weights_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw rtp::DataError(rtp::DataErrorKind::kEmptyFile, "cannot open " + path.string());
  json j;
  try {
    in >> j;
    if (j.is_object()) j = j.at("weights");
    return j.get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw rtp::DataError(rtp::DataErrorKind::kOther, path.string() + ": " + e.what());
  }
}

// uniform | variance | comma list | @weights.json
std::vector<double> resolve_weights(const std::string& spec, std::size_t dim,
                                    const std::vector<double>& variances) {
  std::vector<double> w;
  if (spec == "uniform") {
    w.assign(dim, 1.0);
  } else if (spec == "variance") {
    w = variances;
  } else if (!spec.empty() && spec.front() == '@') {
    w = read_weights_file(spec.substr(1));
  } else {
    w = parse_list(spec, "--weights");
  }
  if (w.size() != dim) {
    throw rtp::UsageError("--weights has " + std::to_string(w.size()) +
                          " entries for " + std::to_string(dim) + " features");
  }
  return w;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw rtp::DataError(rtp::DataErrorKind::kOther, "cannot write " + path.string());
  return out;
}

fs::path sidecar(const fs::path& out) {
  fs::path p = out;
  p.replace_extension(".runtime.json");
  return p;
}

rtp::ProgressFn progress_fn(bool verbose) {
  if (!verbose) return {};
  return [](const std::string& msg) { std::cerr << msg << '\n'; };
}

// --- draw ------------------------------------------------------------------

struct DrawArgs {
  std::string variant = "urtp";
  std::string weights = "uniform";
  std::string domain = "0,1,0,1";
  std::string budget = "3";
  std::string rate_mode;
  std::uint64_t seed = 0;
  std::string out;
  std::string csv;
};

rtp::MeasureKind draw_measure_kind(const std::string& v) {
  try {
    return rtp::parse_measure_kind(v);
  } catch (const rtp::UsageError&) {
    return rtp::measure_kind(rtp::parse_variant(v));
  }
}

int cmd_draw(const DrawArgs& a) {
  const auto box = parse_list(a.domain, "--domain");
  if (box.size() != 4) {
    throw rtp::UsageError("draw works in 2D only: --domain needs xmin,xmax,ymin,ymax");
  }
  if (!(box[1] > box[0]) || !(box[3] > box[2])) throw rtp::UsageError("--domain is empty");
  const double budget = parse_budget(a.budget);
  if (std::isinf(budget)) throw rtp::UsageError("draw needs a finite --budget");
  const rtp::MeasureKind kind = draw_measure_kind(a.variant);
  std::vector<double> weights;
  if (kind == rtp::MeasureKind::kWeightedUniform || kind == rtp::MeasureKind::kWeightedMondrian) {
    weights = resolve_weights(a.weights, 2, {});
  } else if (a.weights != "uniform") {
    const auto w = parse_list(a.weights, "--weights");
    if (w.size() != 2) throw rtp::UsageError("draw works in 2D only: --weights needs 2 entries");
  }
  const rtp::RtpMeasure measure(kind, 2, weights);
  const auto mode = parse_rate(a.rate_mode).value_or(measure.default_rate_mode());
  const rtp::ConvexPolygon2D domain = rtp::make_rectangle(box[0], box[2], box[1], box[3]);
  rtp::Rng rng = rtp::make_rng(a.seed, 0xD2A3);
  const rtp::PriorDraw2D draw = rtp::prior_draw_2d(domain, measure, budget, rng, mode);

  const fs::path out = a.out;
  {
    auto os = open_out(out);
    rtp::write_svg(os, domain, draw.cells, a.seed);
  }
  fs::path csv = a.csv.empty() ? fs::path(out).replace_extension(".csv") : fs::path(a.csv);
  auto os = open_out(csv);
  rtp::write_polygon_csv(os, draw.cells);
  std::cout << draw.cells.size() << " cells, " << draw.cuts.size() << " cuts\n";
  return 0;
}

// --- cube ------------------------------------------------------------------

struct CubeArgs {
  std::size_t n = 2000;
  int splits = 20;
  std::string methods = "urtf,mrtf";
  int trees = 10;
  int particles = 20;
  std::string cuts = "150";
  std::string rate_mode;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out = "cube_report.json";
  std::string csv;
  bool verbose = false;
};

std::vector<int> parse_cuts(const std::string& text) {
  const auto v = parse_list(text, "--cuts");
  std::vector<int> cuts;
  for (double x : v) {
    if (x < 0 || x != std::floor(x)) throw rtp::UsageError("--cuts must be nonnegative integers");
    cuts.push_back(static_cast<int>(x));
  }
  if (cuts.size() == 1) {
    const int last = cuts[0];
    cuts.clear();
    for (int c = 0; c <= last; ++c) cuts.push_back(c);
  }
  return cuts;
}

int cmd_cube(const CubeArgs& a) {
  rtp::CubeConfig c;
  c.n = a.n;
  c.splits = a.splits;
  c.methods.clear();
  std::stringstream ss(a.methods);
  std::string item;
  while (std::getline(ss, item, ',')) c.methods.push_back(rtp::parse_method(item, a.trees));
  if (c.methods.empty()) throw rtp::UsageError("--methods is empty");
  if (a.trees < 1) throw rtp::UsageError("--trees must be >= 1");
  c.particles = a.particles;
  c.cuts = parse_cuts(a.cuts);
  c.rate_mode = parse_rate(a.rate_mode);
  c.seed = a.seed;
  c.threads = a.threads;
  const auto report = rtp::run_cube_experiment(c, progress_fn(a.verbose));
  {
    auto os = open_out(a.out);
    os << rtp::to_json(report).dump(2) << '\n';
  }
  if (!a.csv.empty()) {
    auto os = open_out(a.csv);
    rtp::write_cube_csv(os, report);
  }
  {
    json rt;
    for (std::size_t m = 0; m < c.methods.size(); ++m) {
      rt[c.methods[m].name()] = {{"total_seconds", report.seconds[m]}};
    }
    auto os = open_out(sidecar(a.out));
    os << rt.dump(2) << '\n';
  }
  for (std::size_t m = 0; m < c.methods.size(); ++m) {
    std::cout << c.methods[m].name() << ": " << report.mean_curve(m).back()
              << "% at " << report.cuts.back() << " cuts\n";
  }
  return 0;
}

// --- fit / predict ---------------------------------------------------------

struct FitArgs {
  std::string train;
  std::string test;
  std::string label = "label";
  std::string variant = "urtf";
  int trees = 100;
  int particles = 20;
  std::string budget = "inf";
  int cuts = -1;
  std::string alpha = "empirical";
  std::string weights = "variance";
  std::string rate_mode;
  bool standardize = false;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string model;
};

std::shared_ptr<const rtp::PointData> model_point_data(const rtp::LabeledDataset& all,
                                                       const rtp::Standardizer& scaler) {
  return rtp::make_point_data(scaler.apply(all.predictors), all.labels, all.num_classes());
}

int cmd_fit(const FitArgs& a) {
  const rtp::LabeledDataset train = rtp::load_csv(a.train, a.label);
  if (std::count(train.labels.begin(), train.labels.end(), rtp::kMissingLabel) ==
      static_cast<std::ptrdiff_t>(train.size())) {
    throw rtp::DataError(rtp::DataErrorKind::kEmptyInput, "training file has no labeled rows");
  }
  rtp::LabeledDataset all = train;
  std::size_t n_test = 0;
  if (!a.test.empty()) {
    const rtp::LabeledDataset test =
        rtp::load_csv(a.test, a.label, train.label_dictionary, true);
    if (test.feature_names != train.feature_names) {
      throw rtp::DataError(rtp::DataErrorKind::kDimensionMismatch,
                           "test columns differ from training columns");
    }
    n_test = test.size();
    for (std::size_t i = 0; i < test.size(); ++i) {
      all.predictors.append_row(test.predictors.row(i));
      all.labels.push_back(rtp::kMissingLabel);
    }
  }
  std::vector<int> train_rows(train.size());
  std::iota(train_rows.begin(), train_rows.end(), 0);
  const rtp::Standardizer scaler = a.standardize
                                       ? rtp::Standardizer::fit(train, train_rows)
                                       : rtp::Standardizer::identity(train.dimension());

  rtp::ForestConfig fc;
  fc.variant = rtp::parse_variant(a.variant);
  fc.trees = a.trees;
  fc.particles = a.particles;
  fc.budget = parse_budget(a.budget);
  fc.rate_mode = parse_rate(a.rate_mode);
  if (a.alpha != "empirical") fc.alpha = parse_list(a.alpha, "--alpha");
  if (rtp::is_weighted(fc.variant)) {
    fc.weights = resolve_weights(a.weights, train.dimension(),
                                 rtp::column_variances(train.predictors, train_rows));
  }
  fc.seed = a.seed;
  if (a.cuts >= 0) fc.max_cuts = a.cuts;
  fc.threads = a.threads;

  const auto data = model_point_data(all, scaler);
  const rtp::Forest forest = rtp::fit_forest(data, fc);

  const fs::path dir = a.model;
  json meta;
  meta["label_column"] = train.label_column;
  meta["label_dictionary"] = train.label_dictionary;
  meta["feature_names"] = train.feature_names;
  meta["standardizer"] = {{"means", scaler.means()}, {"sds", scaler.sds()}};
  meta["train_rows"] = train.size();
  meta["test_rows"] = n_test;
  rtp::save_forest(dir, forest, meta);
  {
    auto os = open_out(dir / "data.csv");
    rtp::write_csv(os, all);
  }
  std::size_t total_cuts = 0;
  for (const auto& t : forest.trees) total_cuts += t.tessellation.num_cuts();
  std::cout << "fitted " << forest.trees.size() << " trees ("
            << rtp::display_name(fc.variant) << "), mean "
            << static_cast<double>(total_cuts) / static_cast<double>(forest.trees.size())
            << " cuts per tree; " << n_test << " test rows registered\n";
  return 0;
}

struct PredictArgs {
  std::string model;
  std::string test;
  std::string out;
  std::string vote = "mode";
};

int cmd_predict(const PredictArgs& a) {
  const fs::path dir = a.model;
  const json manifest = rtp::read_manifest(dir);
  json meta;
  std::vector<std::string> dictionary;
  std::string label_column;
  std::size_t n_train = 0;
  std::vector<double> means, sds;
  try {
    meta = manifest.at("metadata");
    dictionary = meta.at("label_dictionary").get<std::vector<std::string>>();
    label_column = meta.at("label_column").get<std::string>();
    n_train = meta.at("train_rows").get<std::size_t>();
    means = meta.at("standardizer").at("means").get<std::vector<double>>();
    sds = meta.at("standardizer").at("sds").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw rtp::DataError(rtp::DataErrorKind::kOther, std::string("manifest: ") + e.what());
  }
  const rtp::LabeledDataset all = rtp::load_csv(dir / "data.csv", label_column, dictionary);
  if (all.label_dictionary.size() != dictionary.size()) {
    throw rtp::DataError(rtp::DataErrorKind::kOther, "model data has unknown labels");
  }
  const rtp::Standardizer scaler(means, sds);
  const auto data = model_point_data(all, scaler);
  const rtp::Forest forest = rtp::load_forest(dir, data);

  const rtp::LabeledDataset test = rtp::load_csv(a.test, label_column, dictionary, true);
  if (test.feature_names != all.feature_names) {
    throw rtp::DataError(rtp::DataErrorKind::kDimensionMismatch,
                         "test columns differ from the model's columns");
  }
  std::map<std::vector<double>, int> registered;
  for (std::size_t i = n_train; i < all.size(); ++i) {
    const auto r = all.predictors.row(i);
    registered.emplace(std::vector<double>(r.begin(), r.end()), static_cast<int>(i));
  }
  std::vector<int> rows;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto r = test.predictors.row(i);
    const auto it = registered.find(std::vector<double>(r.begin(), r.end()));
    if (it == registered.end()) {
      throw rtp::DataError(rtp::DataErrorKind::kUnregisteredRow,
                           "test row " + std::to_string(i + 1) +
                               " was not registered at fit time; predictions need "
                               "test rows added as unlabeled points before fitting "
                               "(pass them to fit --test)");
    }
    rows.push_back(it->second);
  }
  rtp::VoteMode mode;
  if (a.vote == "mode") {
    mode = rtp::VoteMode::kHardVote;
  } else if (a.vote == "mean") {
    mode = rtp::VoteMode::kAverageProbability;
  } else {
    throw rtp::UsageError("--vote must be mode or mean");
  }
  const auto pred = rtp::predict_forest(forest, rows, mode);

  std::ostringstream os;
  os << "row,predicted";
  for (const auto& name : dictionary) os << ",p_" << name;
  os << '\n';
  int labeled = 0;
  int correct = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << i + 1 << ',' << dictionary[static_cast<std::size_t>(pred.labels[i])];
    for (double f : pred.fractions[i]) os << ',' << json(f).dump();
    os << '\n';
    if (test.labels[i] != rtp::kMissingLabel) {
      ++labeled;
      if (test.labels[i] == pred.labels[i]) ++correct;
    }
  }
  if (a.out.empty()) {
    std::cout << os.str();
  } else {
    auto f = open_out(a.out);
    f << os.str();
  }
  if (labeled > 0) {
    std::cerr << "accuracy " << 100.0 * correct / labeled << "% on " << labeled
              << " labeled test rows\n";
  }
  return 0;
}

// --- experiment ------------------------------------------------------------

struct ExperimentArgs {
  std::string config;
  std::string out = "experiment_report.json";
  std::string csv;
  int splits = 0;
  int trees = 0;
  int threads = 0;
  bool verbose = false;
};

int cmd_experiment(const ExperimentArgs& a) {
  std::ifstream in(a.config);
  if (!in) throw rtp::UsageError("cannot open config '" + a.config + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw rtp::UsageError(std::string("config: ") + e.what());
  }
  rtp::ExperimentConfig c =
      rtp::parse_experiment_config(j, fs::path(a.config).parent_path());
  if (a.splits > 0) c.splits = a.splits;
  if (a.trees > 0) c.trees = a.trees;
  if (a.threads > 0) c.threads = a.threads;
  const auto report = rtp::run_experiment(c, progress_fn(a.verbose));
  {
    auto os = open_out(a.out);
    os << rtp::to_json(report).dump(2) << '\n';
  }
  if (!a.csv.empty()) {
    auto os = open_out(a.csv);
    rtp::write_experiment_csv(os, report);
  }
  {
    auto os = open_out(sidecar(a.out));
    os << rtp::runtime_json(report).dump(2) << '\n';
  }
  for (const auto& d : report.datasets) {
    std::cout << d.name << ":";
    for (const auto& m : d.methods) {
      std::cout << ' ' << m.name << '=';
      if (m.accuracy) {
        double s = 0.0;
        for (double x : *m.accuracy) s += x;
        std::cout << s / static_cast<double>(m.accuracy->size());
      } else {
        std::cout << "NA";
      }
    }
    std::cout << " | top " << d.top << '\n';
  }
  return 0;
}

// --- synth-pc --------------------------------------------------------------

struct SynthArgs {
  std::size_t rows = 85;
  std::size_t cols = 85;
  std::size_t minority = 32;
  std::uint64_t seed = 85;
  std::string out;
};

int cmd_synth(const SynthArgs& a) {
  rtp::Rng rng = rtp::make_rng(a.seed, 0x5C0E);
  const auto ds = rtp::synthetic_pc_scores(a.rows, a.cols, a.minority, rng);
  auto os = open_out(a.out);
  rtp::write_csv(os, ds);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random tessellation processes and forests"};
  app.require_subcommand(1);

  DrawArgs draw;
  auto* d = app.add_subcommand("draw", "Draw a 2D prior tessellation to SVG");
  d->add_option("--variant", draw.variant, "urtp, wurtp, mrtp or wmrtp")->capture_default_str();
  d->add_option("--weights", draw.weights, "uniform or a comma list (2 entries)")->capture_default_str();
  d->add_option("--domain", draw.domain, "xmin,xmax,ymin,ymax")->capture_default_str();
  d->add_option("--budget", draw.budget, "time budget")->capture_default_str();
  d->add_option("--rate-mode", draw.rate_mode, "ball or exact");
  d->add_option("--seed", draw.seed)->capture_default_str();
  d->add_option("--out", draw.out, "SVG path")->required();
  d->add_option("--csv", draw.csv, "polygon vertex CSV (default: <out>.csv)");

  CubeArgs cube;
  auto* c = app.add_subcommand("cube", "Mondrian cube accuracy-versus-cuts experiment");
  c->add_option("--n", cube.n, "points")->capture_default_str();
  c->add_option("--splits", cube.splits)->capture_default_str();
  c->add_option("--methods", cube.methods, "comma list, e.g. urtf,mrtf,urtp")->capture_default_str();
  c->add_option("--trees", cube.trees)->capture_default_str();
  c->add_option("--particles", cube.particles)->capture_default_str();
  c->add_option("--cuts", cube.cuts, "largest cut count, or a comma list")->capture_default_str();
  c->add_option("--rate-mode", cube.rate_mode, "ball or exact");
  c->add_option("--seed", cube.seed)->capture_default_str();
  c->add_option("--threads", cube.threads)->capture_default_str();
  c->add_option("--out", cube.out, "JSON report")->capture_default_str();
  c->add_option("--csv", cube.csv, "per-split curve CSV");
  c->add_flag("--verbose", cube.verbose);

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "Fit a random tessellation forest");
  f->add_option("--train", fit.train, "training CSV")->required();
  f->add_option("--test", fit.test, "test CSV registered as unlabeled rows");
  f->add_option("--label", fit.label, "label column")->capture_default_str();
  f->add_option("--variant", fit.variant, "urtf, wurtf, mrtf, wmrtf, urtf-i or mrtf-i")->capture_default_str();
  f->add_option("--trees", fit.trees)->capture_default_str();
  f->add_option("--particles", fit.particles)->capture_default_str();
  f->add_option("--budget", fit.budget, "inf or a positive number")->capture_default_str();
  f->add_option("--cuts", fit.cuts, "stop each particle after this many cuts");
  f->add_option("--alpha", fit.alpha, "empirical or a comma list")->capture_default_str();
  f->add_option("--weights", fit.weights, "uniform, variance, a comma list or @file.json")->capture_default_str();
  f->add_option("--rate-mode", fit.rate_mode, "ball or exact");
  f->add_flag("--standardize", fit.standardize, "scale columns with training statistics");
  f->add_option("--seed", fit.seed)->capture_default_str();
  f->add_option("--threads", fit.threads)->capture_default_str();
  f->add_option("--model-dir,--out", fit.model, "model directory")->required();

  PredictArgs pred;
  auto* p = app.add_subcommand("predict", "Predict registered test rows");
  p->add_option("--model-dir", pred.model, "model directory")->required();
  p->add_option("--test", pred.test, "test CSV")->required();
  p->add_option("--out", pred.out, "prediction CSV (default: stdout)");
  p->add_option("--vote", pred.vote, "mode or mean")->capture_default_str();

  ExperimentArgs exp;
  auto* e = app.add_subcommand("experiment", "Split/fit/predict protocol with sign tests");
  e->add_option("--config", exp.config, "JSON config")->required();
  e->add_option("--out", exp.out, "JSON report")->capture_default_str();
  e->add_option("--csv", exp.csv, "per-split accuracy CSV");
  e->add_option("--splits", exp.splits, "override the config");
  e->add_option("--trees", exp.trees, "override the config");
  e->add_option("--threads", exp.threads, "override the config");
  e->add_flag("--verbose", exp.verbose);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth-pc", "Write a synthetic PC-score table");
  s->add_option("--rows", synth.rows)->capture_default_str();
  s->add_option("--cols", synth.cols)->capture_default_str();
  s->add_option("--minority", synth.minority)->capture_default_str();
  s->add_option("--seed", synth.seed)->capture_default_str();
  s->add_option("--out", synth.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*d) return cmd_draw(draw);
    if (*c) return cmd_cube(cube);
    if (*f) return cmd_fit(fit);
    if (*p) return cmd_predict(pred);
    if (*e) return cmd_experiment(exp);
    if (*s) return cmd_synth(synth);
  } catch (const rtp::UsageError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const rtp::DataError& err) {
    std::cerr << "data error: " << err.what() << '\n';
    return kExitData;
  } catch (const rtp::NumericalError& err) {
    std::cerr << "numerical error: " << err.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
