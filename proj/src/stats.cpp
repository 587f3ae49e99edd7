#include "hdsvar/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hdsvar/types.hpp"

namespace hdsvar::stats {

double normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) throw DataError("normal_quantile: prob must be in (0,1)");
  static const boost::math::normal_distribution<double> dist;
  return boost::math::quantile(dist, prob);
}

double normal_cdf(double x) {
  static const boost::math::normal_distribution<double> dist;
  return boost::math::cdf(dist, x);
}

double chisq_quantile(double prob, double df) {
  if (!(prob > 0.0 && prob < 1.0)) throw DataError("chisq_quantile: prob must be in (0,1)");
  if (!(df > 0.0)) throw DataError("chisq_quantile: df must be positive");
  const boost::math::chi_squared_distribution<double> dist(df);
  return boost::math::quantile(dist, prob);
}

double chisq_cdf(double x, double df) {
  if (!(df > 0.0)) throw DataError("chisq_cdf: df must be positive");
  if (x <= 0.0) return 0.0;
  const boost::math::chi_squared_distribution<double> dist(df);
  return boost::math::cdf(dist, x);
}

double quantile_type7(std::vector<double> sample, double prob) {
  if (sample.empty()) throw DataError("quantile of an empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw DataError("quantile level must be in [0,1]");
  std::sort(sample.begin(), sample.end());
  const std::size_t m = sample.size();
  const double pos = prob * static_cast<double>(m - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= m) return sample[m - 1];
  const double frac = pos - static_cast<double>(lo);
  return sample[lo] + frac * (sample[lo + 1] - sample[lo]);
}

double ks_statistic_normal(std::vector<double> sample) {
  if (sample.empty()) throw DataError("KS statistic of an empty sample");
  std::sort(sample.begin(), sample.end());
  const auto n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = normal_cdf(sample[i]);
    d = std::max(d, f - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
  }
  return d;
}

double ks_pvalue(double d, std::size_t n) {
  // Kolmogorov tail with the Stephens small-sample adjustment of the argument.
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 1e-8) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * lambda * lambda * k * k);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

std::vector<double> bh_adjust(const std::vector<double>& pvalues) {
  const std::size_t m = pvalues.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });
  std::vector<double> adjusted(m);
  double running = 1.0;
  for (std::size_t k = m; k-- > 0;) {
    const double scaled = pvalues[order[k]] * static_cast<double>(m) / static_cast<double>(k + 1);
    running = std::min(running, scaled);
    adjusted[order[k]] = running;
  }
  return adjusted;
}

double mallows_d2(std::vector<double> x, std::vector<double> y) {
  if (x.empty() || y.empty()) throw DataError("Mallows distance of an empty sample");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const std::size_t m = x.size(), k = y.size();
  // Both empirical quantile functions are step functions, constant between the
  // pooled breakpoints {i/m} and {j/k}; integrate the squared gap piece by piece.
  double integral = 0.0;
  std::size_t i = 0, j = 0;
  double u = 0.0;
  while (i < m && j < k) {
    const double bi = static_cast<double>(i + 1) / static_cast<double>(m);
    const double bj = static_cast<double>(j + 1) / static_cast<double>(k);
    const double next = std::min(bi, bj);
    const double gap = x[i] - y[j];
    integral += (next - u) * gap * gap;
    u = next;
    if (bi <= next + 1e-18) ++i;
    if (bj <= next + 1e-18) ++j;
  }
  return std::sqrt(integral);
}

}  // namespace hdsvar::stats
