#include "rtp/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rtp/errors.hpp"

namespace rtp {

void validate_alpha(std::span<const double> alpha) {
  if (alpha.empty()) throw UsageError("alpha must have at least one entry");
  for (double a : alpha) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw UsageError("alpha entries must be finite and > 0");
    }
  }
}

double log_multivariate_beta(std::span<const double> v) {
  double sum = 0.0;
  double acc = 0.0;
  for (double x : v) {
    acc += std::lgamma(x);
    sum += x;
  }
  return acc - std::lgamma(sum);
}

double log_leaf_likelihood(std::span<const int> counts,
                           std::span<const double> alpha) {
  if (counts.size() != alpha.size()) {
    throw UsageError("count vector has " + std::to_string(counts.size()) +
                     " classes, alpha has " + std::to_string(alpha.size()));
  }
  double alpha_sum = 0.0;
  double total = 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    if (counts[k] == 0) {
      alpha_sum += alpha[k];
      continue;
    }
    acc += std::lgamma(alpha[k] + counts[k]) - std::lgamma(alpha[k]);
    alpha_sum += alpha[k];
    total += counts[k];
  }
  if (total == 0.0) return 0.0;
  return acc - (std::lgamma(alpha_sum + total) - std::lgamma(alpha_sum));
}

double log_marginal_likelihood(const CountTable& leaves,
                               std::span<const double> alpha) {
  validate_alpha(alpha);
  double total = 0.0;
  for (const auto& m : leaves) total += log_leaf_likelihood(m, alpha);
  return total;
}

double likelihood_ratio_on_cut(std::span<const int> parent,
                               std::span<const int> minus,
                               std::span<const int> plus,
                               std::span<const double> alpha) {
  validate_alpha(alpha);
  if (parent.size() != alpha.size() || minus.size() != alpha.size() ||
      plus.size() != alpha.size()) {
    throw DataError(DataErrorKind::kDimensionMismatch,
                    "cut counts do not match the number of classes");
  }
  for (std::size_t k = 0; k < parent.size(); ++k) {
    if (parent[k] != minus[k] + plus[k]) {
      throw DataError(DataErrorKind::kOther,
                      "cut counts: parent is not the sum of its children");
    }
  }
  return log_leaf_likelihood(minus, alpha) + log_leaf_likelihood(plus, alpha) -
         log_leaf_likelihood(parent, alpha);
}

std::vector<double> predictive_distribution(std::span<const int> counts,
                                            std::span<const double> alpha) {
  if (counts.size() != alpha.size()) {
    throw UsageError("predictive: count/alpha size mismatch");
  }
  double denom = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) denom += alpha[k] + counts[k];
  std::vector<double> p(alpha.size());
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    p[k] = (alpha[k] + counts[k]) / denom;
  }
  return p;
}

std::vector<double> empirical_alpha(std::span<const int> labels,
                                    int num_classes) {
  if (num_classes < 1) throw UsageError("need at least one class");
  std::vector<double> alpha(static_cast<std::size_t>(num_classes), 0.0);
  for (int z : labels) {
    if (z < 0) continue;
    if (z >= num_classes) {
      throw DataError(DataErrorKind::kOther, "label code out of range");
    }
    alpha[static_cast<std::size_t>(z)] += 1.0;
  }
  for (double& a : alpha) a = std::max(a / 1000.0, kAlphaFloor);
  return alpha;
}

}  // namespace rtp
