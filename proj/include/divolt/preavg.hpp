#pragma once

#include <string>
#include <vector>

namespace divolt {

// One trading session of n equidistant intraday log-returns on [0,1].
struct ReturnGrid {
  std::string date;
  std::vector<double> r;

  int n() const { return static_cast<int>(r.size()); }
};

// Pre-averaging window and kernel constants for the triangular kernel
// g(x) = min(x, 1-x).
struct PreAvgScheme {
  int n = 0;
  int k_n = 0;
  double theta_effective = 0.0;      // k_n / sqrt(n)
  std::vector<double> weights;       // g(j/k_n), j = 1..k_n-1
  double psi1_n = 0.0;               // k_n * sum (g(j/k) - g((j-1)/k))^2
  double psi2_n = 0.0;               // (1/k_n) * sum g(j/k)^2

  static constexpr double kPsi1Limit = 1.0;
  static constexpr double kPsi2Limit = 1.0 / 12.0;

  // Number of pre-averaged values: n - k_n + 2.
  int series_length() const { return n - k_n + 2; }
  // Number of bipower pairs N_n = n - 2 k_n + 2.
  int pair_count() const { return n - 2 * k_n + 2; }
};

// Window rule k_n = round(theta * sqrt(n)), floored at 2. Throws
// std::invalid_argument for invalid inputs or when the window would swallow
// the sample (2 k_n > n).
PreAvgScheme make_scheme(int n, double theta);

struct PreAveragedSeries {
  int n = 0;
  int k_n = 0;
  std::vector<double> values;        // length n - k_n + 2
};

PreAveragedSeries preaverage(const std::vector<double>& returns, const PreAvgScheme& s);
PreAveragedSeries preaverage(const ReturnGrid& day, const PreAvgScheme& s);

}  // namespace divolt
