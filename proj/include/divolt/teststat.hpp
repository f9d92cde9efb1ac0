#pragma once

#include <vector>

#include "divolt/bipower.hpp"
#include "divolt/bootstrap.hpp"
#include "divolt/preavg.hpp"

namespace divolt {

// Variance of n^{1/4}(BV(l1,r1) - BV(l2,r2)^p) by the delta method,
// p = (l1+r1)/(l2+r2):
//   V = S11 - 2p*bv^{p-1}*S12 + p^2*bv^{2(p-1)}*S22.
double v_check_form(const Mat2Sym& sigma, double bv_l2r2, int l1, int r1, int l2, int r2);

// Everything computed from one day of (deflated) returns that the tests and
// the bootstrap need. Scales follow the convention BV(1,1) -> s^2 and
// BV(2,2) -> s^4 where var(pre-averaged return) = s^2/sqrt(n).
struct DayStatistics {
  PreAvgScheme scheme;
  TruncationRule rule;
  double bv11 = 0.0;
  double bv22 = 0.0;
  int truncated_pairs = 0;
  double scale11 = 0.0;
  double scale22 = 0.0;
  std::vector<double> y11, y22;   // unscaled truncated pair products
  int b_n = 0;
  BlockDiagnostics block_diag;
  std::vector<double> d11, d22;   // scaled block differences at b_n
  Mat2Sym sigma;                  // covariance estimate at b_n
  double v_check = 0.0;
  bool v_degenerate = false;      // V <= 0: T_n unavailable
  double z_n = 0.0;
  double t_n = 0.0;               // NaN when v_degenerate

  int j_n() const { return static_cast<int>(d11.size()); }

  DayResampleInput resample_input() const {
    return DayResampleInput{scheme.n, b_n, bv22, bv11, &d22, &d11};
  }
};

// Full day pipeline on an already-deflated return series: pre-average,
// adaptive truncation, bipower pair, block-length selection (unless
// b_override > 0), covariance estimate, and the raw and studentized
// statistics Z_n = n^{1/4}(BV22 - BV11^2), T_n = Z_n / sqrt(V).
DayStatistics day_statistics(const std::vector<double>& returns, double theta,
                             double varpi = 0.49, double trunc_quantile = 0.999,
                             int b_override = 0);

// One-sided p-value 1 - Phi(t) for the normal limit.
double clt_pvalue(double t_n);

// True heterogeneity index 1 - (mean sigma2)^2 / mean(sigma2^2) from a sampled
// spot-variance path; exactly 0 for a constant path.
double h_index_true(const std::vector<double>& sigma2_path);

struct HIndexEstimate {
  double iv_hat = 0.0;
  double iq_hat = 0.0;
  double h_hat = 0.0;     // NaN when degenerate
  double rho2 = 0.0;      // long-run noise variance plug-in
  bool degenerate = false;  // iq_hat <= 0
};

// Noise-corrected sample analogue using the day's bipower pair and the
// long-run noise variance from the same deflated returns.
HIndexEstimate h_index_hat(const DayStatistics& day,
                           const std::vector<double>& deflated_returns, int q);

// Fraction of the pre-averaged second moment attributable to noise:
// clamp([psi1_n * omega2 / (theta_eff^2 psi2_n)] / [BV11 / (theta_eff psi2_n)], 0, 1).
double noise_proportion(const DayStatistics& day, double omega2_hat);

}  // namespace divolt
