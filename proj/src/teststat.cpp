#include "divolt/teststat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "divolt/diurnal.hpp"
#include "divolt/mathutil.hpp"

namespace divolt {

double v_check_form(const Mat2Sym& sigma, double bv_l2r2, int l1, int r1, int l2, int r2) {
  if (l2 + r2 <= 0) throw std::invalid_argument("v_check_form: bad power pair");
  const double p = static_cast<double>(l1 + r1) / (l2 + r2);
  const double g = p * std::pow(bv_l2r2, p - 1.0);
  return sigma.a11 - 2.0 * g * sigma.a12 + g * g * sigma.a22;
}

DayStatistics day_statistics(const std::vector<double>& returns, double theta,
                             double varpi, double trunc_quantile, int b_override) {
  DayStatistics day;
  day.scheme = make_scheme(static_cast<int>(returns.size()), theta);
  const PreAveragedSeries series = preaverage(returns, day.scheme);
  day.rule = adaptive_threshold(series, day.scheme, varpi, trunc_quantile);

  const int n = day.scheme.n;
  const int pairs = day.scheme.pair_count();
  day.scale11 = bv_normalizer(n, pairs, 1, 1);
  day.scale22 = bv_normalizer(n, pairs, 2, 2);
  day.y11 = pair_products(series, day.scheme.k_n, 1, 1, day.rule.upsilon);
  day.y22 = pair_products(series, day.scheme.k_n, 2, 2, day.rule.upsilon);
  double sum11 = 0.0, sum22 = 0.0;
  for (double v : day.y11) sum11 += v;
  for (double v : day.y22) sum22 += v;
  day.bv11 = day.scale11 * sum11;
  day.bv22 = day.scale22 * sum22;
  for (int i = 0; i < pairs; ++i) {
    const double a = std::fabs(series.values[static_cast<std::size_t>(i)]);
    const double b = std::fabs(series.values[static_cast<std::size_t>(i + day.scheme.k_n)]);
    if (!(a < day.rule.upsilon && b < day.rule.upsilon)) ++day.truncated_pairs;
  }

  if (b_override > 0) {
    day.b_n = b_override;
    day.block_diag.candidates = {b_override};
    day.block_diag.v_candidates = {0.0};
    day.block_diag.chosen_index = 0;
  } else {
    day.b_n = select_block_size(day.y22, day.y11, n, day.scheme.k_n, day.scale22,
                                day.scale11, day.bv11, &day.block_diag);
  }
  if (2 * day.b_n > pairs) {
    throw std::invalid_argument("day_statistics: block length exceeds N_n/2");
  }

  day.d22 = block_diffs(day.y22, day.b_n, day.scale22);
  day.d11 = block_diffs(day.y11, day.b_n, day.scale11);
  day.sigma = sigma_check(day.d22, day.d11, n, day.b_n);
  day.v_check = v_check_form(day.sigma, day.bv11, 2, 2, 1, 1);
  day.z_n = std::pow(static_cast<double>(n), 0.25) * (day.bv22 - day.bv11 * day.bv11);
  if (day.v_check > 0.0) {
    day.t_n = day.z_n / std::sqrt(day.v_check);
  } else {
    day.v_degenerate = true;
    day.t_n = std::numeric_limits<double>::quiet_NaN();
  }
  return day;
}

double clt_pvalue(double t_n) { return 1.0 - normal_cdf(t_n); }

double h_index_true(const std::vector<double>& sigma2_path) {
  if (sigma2_path.empty()) throw std::invalid_argument("h_index_true: empty path");
  const auto [lo, hi] = std::minmax_element(sigma2_path.begin(), sigma2_path.end());
  if (*lo == *hi) return 0.0;
  double iv = 0.0, iq = 0.0;
  for (double s2 : sigma2_path) {
    iv += s2;
    iq += s2 * s2;
  }
  iv /= static_cast<double>(sigma2_path.size());
  iq /= static_cast<double>(sigma2_path.size());
  return 1.0 - iv * iv / iq;
}

HIndexEstimate h_index_hat(const DayStatistics& day,
                           const std::vector<double>& deflated_returns, int q) {
  HIndexEstimate est;
  est.rho2 = longrun_noise_variance(deflated_returns, q);
  const double theta = day.scheme.theta_effective;
  const double a = 1.0 / (theta * day.scheme.psi2_n);
  const double bias = day.scheme.psi1_n / (theta * theta * day.scheme.psi2_n);
  est.iv_hat = a * day.bv11 - bias * est.rho2;
  est.iq_hat = a * a * day.bv22 - 2.0 * bias * est.rho2 * est.iv_hat -
               bias * bias * est.rho2 * est.rho2;
  if (est.iq_hat <= 0.0) {
    est.degenerate = true;
    est.h_hat = std::numeric_limits<double>::quiet_NaN();
  } else {
    est.h_hat = 1.0 - est.iv_hat * est.iv_hat / est.iq_hat;
  }
  return est;
}

double noise_proportion(const DayStatistics& day, double omega2_hat) {
  if (!(day.bv11 > 0.0)) throw std::invalid_argument("noise_proportion: needs BV11 > 0");
  if (omega2_hat < 0.0) throw std::invalid_argument("noise_proportion: needs omega2 >= 0");
  const double theta = day.scheme.theta_effective;
  const double bias_term = day.scheme.psi1_n * omega2_hat / (theta * theta * day.scheme.psi2_n);
  const double total = day.bv11 / (theta * day.scheme.psi2_n);
  const double ratio = bias_term / total;
  return std::clamp(ratio, 0.0, 1.0);
}

}  // namespace divolt
