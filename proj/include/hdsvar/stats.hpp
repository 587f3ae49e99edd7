#pragma once

#include <cstddef>
#include <vector>

namespace hdsvar::stats {

// Standard normal quantile / CDF.
double normal_quantile(double prob);
double normal_cdf(double x);

// Chi-square quantile / CDF with df > 0 degrees of freedom.
double chisq_quantile(double prob, double df);
double chisq_cdf(double x, double df);

// Sample quantile with linear order-statistic interpolation
// (Hyndman–Fan type 7, the common statistical-software default).
// The input is copied and sorted; throws DataError on an empty sample.
double quantile_type7(std::vector<double> sample, double prob);

// Kolmogorov–Smirnov distance of a sample against the standard normal,
// and the asymptotic p-value with the usual finite-sample size correction.
double ks_statistic_normal(std::vector<double> sample);
double ks_pvalue(double d, std::size_t n);

// Benjamini–Hochberg step-up adjusted p-values, returned in the input order.
std::vector<double> bh_adjust(const std::vector<double>& pvalues);

// Mallows (Wasserstein-2) distance between two empirical distributions:
// the exact integral of the squared difference of the two empirical quantile
// step functions over (0, 1), square-rooted.
double mallows_d2(std::vector<double> x, std::vector<double> y);

}  // namespace hdsvar::stats
