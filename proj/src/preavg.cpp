#include "divolt/preavg.hpp"

#include <cmath>
#include <stdexcept>

#include "divolt/kernels.hpp"

namespace divolt {

namespace {

inline double tri_kernel(double x) { return x < 1.0 - x ? x : 1.0 - x; }

}  // namespace

PreAvgScheme make_scheme(int n, double theta) {
  if (n < 4) throw std::invalid_argument("make_scheme: need n >= 4");
  if (!(theta > 0.0)) throw std::invalid_argument("make_scheme: need theta > 0");
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  int k = static_cast<int>(std::lround(theta * sqrt_n));
  if (k < 2) k = 2;
  if (2 * k > n) throw std::invalid_argument("make_scheme: window k_n exceeds n/2");

  PreAvgScheme s;
  s.n = n;
  s.k_n = k;
  s.theta_effective = static_cast<double>(k) / sqrt_n;
  s.weights.resize(static_cast<std::size_t>(k - 1));
  for (int j = 1; j < k; ++j) {
    s.weights[static_cast<std::size_t>(j - 1)] = tri_kernel(static_cast<double>(j) / k);
  }
  double sum_sq_diff = 0.0;
  double sum_sq = 0.0;
  double prev = 0.0;  // g(0) = 0
  for (int j = 1; j <= k; ++j) {
    const double g = j == k ? 0.0 : s.weights[static_cast<std::size_t>(j - 1)];
    sum_sq_diff += (g - prev) * (g - prev);
    if (j < k) sum_sq += g * g;
    prev = g;
  }
  s.psi1_n = k * sum_sq_diff;
  s.psi2_n = sum_sq / k;
  return s;
}

PreAveragedSeries preaverage(const std::vector<double>& returns, const PreAvgScheme& s) {
  if (static_cast<int>(returns.size()) != s.n) {
    throw std::invalid_argument("preaverage: return count does not match scheme");
  }
  PreAveragedSeries out;
  out.n = s.n;
  out.k_n = s.k_n;
  out.values.resize(static_cast<std::size_t>(s.series_length()));
  kern::active().weighted_moving_sum(returns.data(), returns.size(),
                                     s.weights.data(), s.weights.size(),
                                     out.values.data());
  return out;
}

PreAveragedSeries preaverage(const ReturnGrid& day, const PreAvgScheme& s) {
  return preaverage(day.r, s);
}

}  // namespace divolt
