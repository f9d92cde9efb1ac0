#pragma once

#include <cstddef>
#include <vector>

namespace divolt {

// Standard normal CDF.
double normal_cdf(double x);

// Standard normal quantile (Wichura's PPND16 rational approximations,
// accurate to ~1e-16 on (0,1)). Throws std::invalid_argument outside (0,1).
double normal_quantile(double p);

// E|Z|^p for Z ~ N(0,1): 2^{p/2} Gamma((p+1)/2) / sqrt(pi). Requires p > -1.
double abs_moment(double p);

// Sample mean and population variance (divide by n) of a vector.
double mean_of(const std::vector<double>& x);
double pop_variance(const std::vector<double>& x);

// k-th smallest (1-based) of a copy of x; used for percentile order statistics.
double order_statistic(std::vector<double> x, std::size_t k);

}  // namespace divolt
