#include "rtp/smc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include "rtp/errors.hpp"
#include "rtp/likelihood.hpp"

namespace rtp {

namespace {

constexpr std::uint64_t kPropagateStream = 1;
constexpr std::uint64_t kResampleStream = 2;

std::vector<double> normalize_log_weights(std::span<const Particle> particles) {
  double top = -std::numeric_limits<double>::infinity();
  for (const Particle& p : particles) top = std::max(top, p.log_weight);
  if (!std::isfinite(top)) throw NumericalError("all particle weights vanished");
  std::vector<double> w(particles.size());
  double sum = 0.0;
  for (std::size_t m = 0; m < particles.size(); ++m) {
    w[m] = std::exp(particles[m].log_weight - top);
    sum += w[m];
  }
  for (double& x : w) x /= sum;
  return w;
}

}  // namespace

std::vector<std::size_t> multinomial_resample(std::span<const double> weights,
                                              std::size_t count, Rng& rng) {
  if (weights.empty()) throw UsageError("resampling needs at least one weight");
  std::vector<double> cdf(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cdf.begin());
  const double total = cdf.back();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw NumericalError("resampling weights do not sum to a positive value");
  }
  std::uniform_real_distribution<double> unit(0.0, total);
  std::vector<std::size_t> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), unit(rng));
    out[i] = std::min(static_cast<std::size_t>(it - cdf.begin()),
                      weights.size() - 1);
  }
  return out;
}

std::size_t argmax_lowest(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

PosteriorEstimate run_smc(std::shared_ptr<const PointData> data,
                          const SmcConfig& config, const SmcObserver& observer) {
  if (!data) throw UsageError("run_smc: no data");
  if (config.particles < 1) throw UsageError("need at least one particle");
  if (!(config.budget > 0.0)) throw UsageError("budget must be > 0");
  if (config.max_cuts && *config.max_cuts < 0) {
    throw UsageError("cut budget must be >= 0");
  }
  const bool any_labeled =
      data->labeled() &&
      std::any_of(data->labels.begin(), data->labels.end(),
                  [](int z) { return z >= 0; });
  if (config.likelihood_weighting && !any_labeled) {
    throw UsageError("likelihood weighting needs at least one labeled row");
  }

  PosteriorEstimate est;
  if (!config.alpha.empty()) {
    est.alpha = config.alpha;
  } else if (data->labeled()) {
    est.alpha = empirical_alpha(data->labels, data->num_classes);
  } else {
    est.alpha = {1.0};
  }
  validate_alpha(est.alpha);
  if (data->labeled() &&
      est.alpha.size() != static_cast<std::size_t>(data->num_classes)) {
    throw UsageError("alpha has " + std::to_string(est.alpha.size()) +
                     " entries for " + std::to_string(data->num_classes) +
                     " classes");
  }

  TessellationOptions opts;
  opts.budget = config.budget;
  opts.rate_mode = config.rate_mode.value_or(config.measure.default_rate_mode());
  opts.pause_pure = true;

  const std::size_t M = static_cast<std::size_t>(config.particles);
  const double uniform_log = -std::log(static_cast<double>(M));
  {
    Particle root{Tessellation(data, config.measure, opts), uniform_log, false};
    if (config.max_cuts && *config.max_cuts == 0) root.finished = true;
    est.particles.assign(M, root);
  }
  est.weights.assign(M, 1.0 / static_cast<double>(M));

  auto unfinished = [&] {
    return std::any_of(est.particles.begin(), est.particles.end(),
                       [](const Particle& p) { return !p.finished; });
  };

  int iteration = 0;
  while (unfinished()) {
    if (iteration > 0) {
      Rng rng = make_rng(config.seed, kResampleStream,
                         static_cast<std::uint64_t>(iteration));
      const auto ancestors = multinomial_resample(est.weights, M, rng);
      std::vector<Particle> next;
      next.reserve(M);
      for (std::size_t a : ancestors) next.push_back(est.particles[a]);
      est.particles = std::move(next);
    }
    for (Particle& p : est.particles) p.log_weight = uniform_log;

    for (std::size_t m = 0; m < M; ++m) {
      Particle& p = est.particles[m];
      if (p.finished) continue;
      Rng rng = make_rng(config.seed, kPropagateStream,
                         static_cast<std::uint64_t>(iteration), m);
      const AdvanceResult r = p.tessellation.advance(rng);
      if (r.event != AdvanceEvent::kCutApplied) {
        p.finished = true;
        continue;
      }
      if (config.likelihood_weighting) {
        p.log_weight += likelihood_ratio_on_cut(r.parent->counts, r.minus->counts,
                                                r.plus->counts, est.alpha);
      }
      if (config.max_cuts &&
          p.tessellation.num_cuts() >= static_cast<std::size_t>(*config.max_cuts)) {
        p.finished = true;
      }
    }
    est.weights = normalize_log_weights(est.particles);
    ++iteration;
    if (observer) observer(iteration, est.particles, est.weights);
  }
  est.iterations = iteration;
  est.selected = argmax_lowest(est.weights);
  return est;
}

Prediction predict(const Tessellation& tessellation,
                   std::span<const double> alpha, std::span<const int> rows) {
  const PointData& data = tessellation.data();
  if (!data.labeled()) throw UsageError("prediction needs labeled training data");
  if (alpha.size() != static_cast<std::size_t>(data.num_classes)) {
    throw UsageError("alpha size does not match the number of classes");
  }
  std::unordered_map<int, const Polytope*> by_id;
  for (const auto& leaf : tessellation.leaves()) by_id[leaf->id] = leaf.get();
  const std::vector<int> assignment = tessellation.leaf_assignment();

  Prediction out;
  out.probabilities.reserve(rows.size());
  out.labels.reserve(rows.size());
  for (int row : rows) {
    if (row < 0 || static_cast<std::size_t>(row) >= data.size()) {
      throw DataError(DataErrorKind::kUnregisteredRow,
                      "row " + std::to_string(row) +
                          " was not registered with the tessellation; test "
                          "rows must be added as unlabeled points before "
                          "fitting");
    }
    const Polytope* leaf = by_id.at(assignment[static_cast<std::size_t>(row)]);
    auto probs = predictive_distribution(leaf->counts, alpha);
    out.labels.push_back(static_cast<int>(argmax_lowest(probs)));
    out.probabilities.push_back(std::move(probs));
  }
  return out;
}

Prediction predict(const PosteriorEstimate& estimate, std::span<const int> rows) {
  return predict(estimate.best(), estimate.alpha, rows);
}

}  // namespace rtp
