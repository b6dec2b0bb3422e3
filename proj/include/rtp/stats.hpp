#pragma once

#include <span>
#include <vector>

namespace rtp::stats {

// Asymptotic Kolmogorov tail P(K > lambda).
double kolmogorov_tail(double lambda);

// One-sample KS test of samples against Uniform[0, 1].
double ks_uniform_pvalue(std::vector<double> samples);

// Two-sample KS test.
double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b);

// Pearson goodness of fit of counts against category probabilities.
double chi_square_gof_pvalue(std::span<const double> observed,
                             std::span<const double> probabilities);

// Chi-square test of homogeneity for two histograms over the same bins.
// Adjacent bins are pooled until each pooled bin has a combined count of at
// least `min_pooled`.
double chi_square_two_sample_pvalue(std::span<const double> a,
                                    std::span<const double> b,
                                    double min_pooled = 10.0);

// Two-sided pooled z-test for equal success probabilities.
double two_proportion_pvalue(double successes_a, double trials_a,
                             double successes_b, double trials_b);

// P(X >= k) for X ~ Binomial(n, p).
double binomial_upper_tail(int k, int n, double p);

// One-sided sign test that method A beats method B. Ties count against A.
double sign_test_pvalue(int wins, int losses, int ties);

}  // namespace rtp::stats
