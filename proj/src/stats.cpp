#include "rtp/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "rtp/errors.hpp"

namespace rtp::stats {

double kolmogorov_tail(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double ks_uniform_pvalue(std::vector<double> samples) {
  if (samples.empty()) throw UsageError("KS test needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = std::clamp(samples[i], 0.0, 1.0);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double sn = std::sqrt(n);
  return kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d);
}

double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw UsageError("KS test needs samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return kolmogorov_tail((ne + 0.12 + 0.11 / ne) * d);
}

double chi_square_gof_pvalue(std::span<const double> observed,
                             std::span<const double> probabilities) {
  if (observed.size() != probabilities.size() || observed.size() < 2) {
    throw UsageError("chi-square: need >= 2 matching categories");
  }
  double n = 0.0;
  for (double o : observed) n += o;
  double stat = 0.0;
  int df = -1;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const double e = n * probabilities[k];
    if (e <= 0.0) {
      if (observed[k] > 0.0) return 0.0;
      continue;
    }
    stat += (observed[k] - e) * (observed[k] - e) / e;
    ++df;
  }
  if (df < 1) return 1.0;
  boost::math::chi_squared dist(df);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

double chi_square_two_sample_pvalue(std::span<const double> a,
                                    std::span<const double> b,
                                    double min_pooled) {
  if (a.size() != b.size()) throw UsageError("chi-square: histogram sizes differ");
  std::vector<double> pa;
  std::vector<double> pb;
  double ca = 0.0;
  double cb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ca += a[k];
    cb += b[k];
    if (ca + cb >= min_pooled) {
      pa.push_back(ca);
      pb.push_back(cb);
      ca = cb = 0.0;
    }
  }
  if (ca + cb > 0.0) {
    if (pa.empty()) {
      pa.push_back(ca);
      pb.push_back(cb);
    } else {
      pa.back() += ca;
      pb.back() += cb;
    }
  }
  if (pa.size() < 2) return 1.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t k = 0; k < pa.size(); ++k) {
    na += pa[k];
    nb += pb[k];
  }
  const double n = na + nb;
  double stat = 0.0;
  for (std::size_t k = 0; k < pa.size(); ++k) {
    const double col = pa[k] + pb[k];
    const double ea = na * col / n;
    const double eb = nb * col / n;
    stat += (pa[k] - ea) * (pa[k] - ea) / ea + (pb[k] - eb) * (pb[k] - eb) / eb;
  }
  boost::math::chi_squared dist(static_cast<double>(pa.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

double two_proportion_pvalue(double sa, double na, double sb, double nb) {
  if (!(na > 0.0) || !(nb > 0.0)) throw UsageError("proportion test needs trials");
  const double pooled = (sa + sb) / (na + nb);
  const double var = pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb);
  const double diff = sa / na - sb / nb;
  if (var <= 0.0) return diff == 0.0 ? 1.0 : 0.0;
  const double z = std::abs(diff) / std::sqrt(var);
  boost::math::normal std_normal;
  return 2.0 * boost::math::cdf(boost::math::complement(std_normal, z));
}

double binomial_upper_tail(int k, int n, double p) {
  if (n < 0 || p < 0.0 || p > 1.0) throw UsageError("binomial tail: bad arguments");
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  boost::math::binomial dist(n, p);
  // P(X >= k) = 1 - P(X <= k - 1)
  return boost::math::cdf(boost::math::complement(dist, k - 1));
}

double sign_test_pvalue(int wins, int losses, int ties) {
  if (wins < 0 || losses < 0 || ties < 0) throw UsageError("sign test: negative count");
  const int n = wins + losses + ties;
  if (n == 0) return 1.0;
  return binomial_upper_tail(wins, n, 0.5);
}

}  // namespace rtp::stats
