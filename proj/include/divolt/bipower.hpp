#pragma once

#include <limits>
#include <vector>

#include "divolt/preavg.hpp"

namespace divolt {

// Truncation cutoff on pre-averaged returns: upsilon = scale_c * (k_n/n)^varpi
// with scale_c tied to the estimated dispersion of the pre-averaged series.
struct TruncationRule {
  double upsilon = std::numeric_limits<double>::infinity();
  double varpi = 0.49;
  double quantile = 0.999;
  double scale_c = 0.0;

  static TruncationRule none() { return TruncationRule{}; }
};

struct BipowerEstimate {
  double value = 0.0;
  int l = 0;
  int r = 0;
  int pair_count = 0;
  double threshold = std::numeric_limits<double>::infinity();
  int truncated_pairs = 0;
};

// Normalizer n^{(l+r)/4} / (N_n * mu_l * mu_r) applied to the sum of pair
// products, where mu_p = E|Z|^p.
double bv_normalizer(int n, int pair_count, int l, int r);

// Unscaled products |v_i|^l |v_{i+k_n}|^r with per-factor truncation,
// i = 0..N_n-1. Shared between the point estimates and the bootstrap.
std::vector<double> pair_products(const PreAveragedSeries& v, int k_n, int l, int r,
                                  double threshold);

BipowerEstimate bipower(const PreAveragedSeries& v, const PreAvgScheme& s, int l, int r);

BipowerEstimate truncated_bipower(const PreAveragedSeries& v, const PreAvgScheme& s,
                                  int l, int r, const TruncationRule& rule);

// Data-adaptive cutoff: scale_c = Phi^{-1}(quantile) * sqrt(BV(1,1)), so the
// cutoff sits at the `quantile` point of the prevailing pre-averaged
// dispersion. Throws divolt::data_error when the series has no dispersion.
TruncationRule adaptive_threshold(const PreAveragedSeries& v, const PreAvgScheme& s,
                                  double varpi = 0.49, double quantile = 0.999);

}  // namespace divolt
