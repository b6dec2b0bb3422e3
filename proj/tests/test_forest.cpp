#include <algorithm>
#include <filesystem>
#include <numeric>
#include <set>
#include <sstream>

#include "doctest.h"

#include "rtp/errors.hpp"
#include "rtp/forest.hpp"

using namespace rtp;

namespace {

// Training rows (labels from a diagonal rule) followed by unlabeled test rows.
std::shared_ptr<const PointData> diagonal_data(Rng& rng, std::size_t train,
                                               std::size_t test,
                                               std::vector<int>* test_truth = nullptr) {
  PointMatrix pts(0, 2);
  std::vector<int> labels;
  std::uniform_real_distribution<double> u(0, 1);
  for (std::size_t i = 0; i < train + test; ++i) {
    const double x = u(rng);
    const double y = u(rng);
    pts.append_row(std::vector<double>{x, y});
    const int z = x + y > 1.0 ? 1 : 0;
    if (i < train) {
      labels.push_back(z);
    } else {
      labels.push_back(kMissingLabel);
      if (test_truth) test_truth->push_back(z);
    }
  }
  return make_point_data(std::move(pts), std::move(labels), 2);
}

std::string log_text(const Tessellation& t) {
  std::ostringstream os;
  write_cut_log(os, t.cut_log());
  return os.str();
}

std::vector<int> range(int from, int to) {
  std::vector<int> r(static_cast<std::size_t>(to - from));
  std::iota(r.begin(), r.end(), from);
  return r;
}

}  // namespace

TEST_CASE("variant names") {
  for (Variant v : kAllVariants) CHECK(parse_variant(to_string(v)) == v);
  CHECK(display_name(Variant::kURTFI) == "uRTF.i");
  CHECK(display_name(Variant::kWMRTF) == "wMRTF");
  CHECK(measure_kind(Variant::kMRTFI) == MeasureKind::kMondrian);
  CHECK(measure_kind(Variant::kWURTF) == MeasureKind::kWeightedUniform);
  CHECK_FALSE(uses_likelihood(Variant::kURTFI));
  CHECK(uses_likelihood(Variant::kWMRTF));
  CHECK_THROWS_AS(parse_variant("gbm"), UsageError);
}

TEST_CASE("a one-tree forest is a single SMC run") {
  Rng rng(1);
  auto data = diagonal_data(rng, 40, 10);
  ForestConfig cfg;
  cfg.trees = 1;
  cfg.seed = 17;
  const Forest f = fit_forest(data, cfg);
  const auto est = run_smc(data, make_smc_config(f.config, 2, 0));
  CHECK(log_text(f.trees[0].tessellation) == log_text(est.best()));
  CHECK(f.trees[0].seed == tree_seed(17, 0));
}

TEST_CASE("forests are reproducible and independent of thread count") {
  Rng rng(2);
  auto data = diagonal_data(rng, 50, 10);
  ForestConfig cfg;
  cfg.trees = 3;
  cfg.seed = 5;
  const Forest a = fit_forest(data, cfg);
  cfg.threads = 3;
  const Forest b = fit_forest(data, cfg);
  REQUIRE(a.trees.size() == 3);
  for (std::size_t t = 0; t < 3; ++t) {
    CHECK(log_text(a.trees[t].tessellation) == log_text(b.trees[t].tessellation));
  }
}

TEST_CASE("different seeds give different trees") {
  Rng rng(3);
  auto data = diagonal_data(rng, 60, 0);
  std::set<std::string> logs;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ForestConfig cfg;
    cfg.trees = 1;
    cfg.seed = seed;
    logs.insert(log_text(fit_forest(data, cfg).trees[0].tessellation));
  }
  CHECK(logs.size() == 10);
}

TEST_CASE("mode with smallest-label ties") {
  CHECK(modal_label(std::vector<int>{2, 1}) == 0);
  CHECK(modal_label(std::vector<int>{1, 1}) == 0);
  CHECK(modal_label(std::vector<int>{0, 3, 3}) == 1);
  CHECK(modal_label(std::vector<int>{0, 0, 4}) == 2);
}

TEST_CASE("forest votes and permutation invariance") {
  Rng rng(4);
  std::vector<int> truth;
  auto data = diagonal_data(rng, 80, 40, &truth);
  ForestConfig cfg;
  cfg.variant = Variant::kMRTF;
  cfg.trees = 7;
  cfg.seed = 8;
  Forest f = fit_forest(data, cfg);
  const auto rows = range(80, 120);
  const auto pred = predict_forest(f, rows);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(std::accumulate(pred.votes[i].begin(), pred.votes[i].end(), 0) == 7);
    CHECK(pred.labels[i] == modal_label(pred.votes[i]));
  }
  const auto correct = std::inner_product(pred.labels.begin(), pred.labels.end(),
                                          truth.begin(), 0, std::plus<>(),
                                          std::equal_to<>());
  CHECK(correct >= 30);

  std::reverse(f.trees.begin(), f.trees.end());
  std::rotate(f.trees.begin(), f.trees.begin() + 2, f.trees.end());
  CHECK(predict_forest(f, rows).labels == pred.labels);

  const auto soft = predict_forest(f, rows, VoteMode::kAverageProbability);
  for (const auto& row : soft.fractions) {
    CHECK(std::accumulate(row.begin(), row.end(), 0.0) == doctest::Approx(1.0));
  }
}

TEST_CASE("weighted variants need one weight per column") {
  Rng rng(5);
  auto data = diagonal_data(rng, 20, 0);
  ForestConfig cfg;
  cfg.variant = Variant::kWURTF;
  cfg.trees = 2;
  CHECK_THROWS_AS(fit_forest(data, cfg), UsageError);
  cfg.weights = {3.0, 1.0};
  CHECK_NOTHROW(fit_forest(data, cfg));
  cfg.trees = 0;
  CHECK_THROWS_AS(fit_forest(data, cfg), UsageError);
}

TEST_CASE("save and load reproduce predictions") {
  Rng rng(6);
  auto data = diagonal_data(rng, 60, 20);
  for (Variant v : kAllVariants) {
    ForestConfig cfg;
    cfg.variant = v;
    cfg.trees = 3;
    cfg.seed = 21;
    if (is_weighted(v)) cfg.weights = {2.0, 0.5};
    const Forest f = fit_forest(data, cfg);
    const auto dir = std::filesystem::temp_directory_path() /
                     ("rtp_forest_test_" + std::string(to_string(v)));
    std::filesystem::remove_all(dir);
    save_forest(dir, f, {{"note", "x"}});
    CHECK(read_manifest(dir)["metadata"]["note"] == "x");
    const Forest g = load_forest(dir, data);
    REQUIRE(g.trees.size() == f.trees.size());
    for (std::size_t t = 0; t < f.trees.size(); ++t) {
      CHECK(log_text(g.trees[t].tessellation) == log_text(f.trees[t].tessellation));
      CHECK(g.trees[t].tessellation.leaf_assignment() ==
            f.trees[t].tessellation.leaf_assignment());
    }
    const auto rows = range(60, 80);
    const auto a = predict_forest(f, rows);
    const auto b = predict_forest(g, rows);
    CHECK(a.labels == b.labels);
    CHECK(a.votes == b.votes);
    std::filesystem::remove_all(dir);
  }
  CHECK_THROWS_AS(read_manifest(std::filesystem::temp_directory_path() / "rtp_no_model_here"),
                  UsageError);
}
