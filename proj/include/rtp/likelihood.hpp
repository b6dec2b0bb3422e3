#pragma once

#include <span>
#include <vector>

namespace rtp {

// Per-leaf label counts m_j (one row per leaf, K columns).
using CountTable = std::vector<std::vector<int>>;

// log B(v) = sum_k lgamma(v_k) - lgamma(sum_k v_k).
double log_multivariate_beta(std::span<const double> v);

// log B(alpha + m) - log B(alpha) for a single leaf.
double log_leaf_likelihood(std::span<const int> counts,
                           std::span<const double> alpha);

// Dirichlet-multinomial marginal likelihood of all leaves, in log space.
// Throws UsageError on non-positive alpha or a K mismatch.
double log_marginal_likelihood(const CountTable& leaves,
                               std::span<const double> alpha);

// log of the likelihood ratio after splitting a leaf with counts `parent`
// into `minus` and `plus`; every other leaf cancels. Throws DataError when
// parent != minus + plus.
double likelihood_ratio_on_cut(std::span<const int> parent,
                               std::span<const int> minus,
                               std::span<const int> plus,
                               std::span<const double> alpha);

// Posterior mean of the leaf's label distribution.
std::vector<double> predictive_distribution(std::span<const int> counts,
                                            std::span<const double> alpha);

inline constexpr double kAlphaFloor = 1e-6;

// alpha_k = n_k / 1000 over labeled entries (labels < 0 are ignored),
// floored at kAlphaFloor so classes absent from training stay valid.
std::vector<double> empirical_alpha(std::span<const int> labels,
                                    int num_classes);

void validate_alpha(std::span<const double> alpha);

}  // namespace rtp
