#pragma once

#include <string>
#include <vector>

#include "divolt/preavg.hpp"

namespace divolt {

// Deterministic intraday variance shape on m bins; entries are positive and
// average exactly to 1 (so deflation leaves total variance untouched).
struct DiurnalProfile {
  int m = 0;
  std::vector<double> sigma2_u;
};

struct DiurnalOptions {
  int m = 78;
  int q = 3;                       // noise MA order bound
  double floor_value = 0.01;       // lower floor before renormalization
  bool drop_outliers = false;      // drop largest slow returns per bin
  double outlier_fraction = 0.01;
};

DiurnalProfile flat_profile(int m);

// Uncentered autocovariance gamma(k) = (1/(len-k)) sum_i x_i x_{i+k}.
double autocov(const std::vector<double>& x, int k);

// Noise variance omega^2 = max(0, -sum_{k=1}^{q+1} k*gamma(k)); exact for
// returns contaminated by MA(q) noise, and robust to the diffusive part.
double robust_noise_variance(const std::vector<double>& x, int q);

// Unclamped long-run noise variance rho(0) + 2*sum_{k=1..q} rho(k) with
// rho(k) = -sum_{j=1..q-k+1} j*gamma(k+j); feeds the H-index bias correction.
double longrun_noise_variance(const std::vector<double>& x, int q);

// Two-scale bin-wise profile: per bin, the slow-frequency realized variance
// (sqrt(m) * bin return)^2 averaged over days, less twice the bin-level noise
// bias 2*m*omega2_bin, floored and renormalized to bin-average 1.
// Requires at least 2 days, a common n divisible by m, and n/m > q+1.
DiurnalProfile estimate_profile(const std::vector<ReturnGrid>& days,
                                const DiurnalOptions& opt);

// Divide each fast return by sigma_u at its bin; return i (1-based) is looked
// up at s = i/n within [(j-1)/m, j/m), the s = 1 boundary mapping to bin m.
std::vector<double> deflate(const std::vector<double>& returns, const DiurnalProfile& p);
ReturnGrid deflate(const ReturnGrid& day, const DiurnalProfile& p);

// CSV with header bin_index,s_left,s_right,sigma2_u. Reading renormalizes the
// bin-average to exactly 1 and rejects non-positive entries.
void write_profile_csv(const DiurnalProfile& p, const std::string& path);
DiurnalProfile read_profile_csv(const std::string& path);

}  // namespace divolt
