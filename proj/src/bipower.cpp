#include "divolt/bipower.hpp"

#include <cmath>
#include <stdexcept>

#include "divolt/errors.hpp"
#include "divolt/kernels.hpp"
#include "divolt/mathutil.hpp"

namespace divolt {

double bv_normalizer(int n, int pair_count, int l, int r) {
  if (pair_count < 1) throw std::invalid_argument("bv_normalizer: need at least one pair");
  const double mu_l = abs_moment(static_cast<double>(l));
  const double mu_r = abs_moment(static_cast<double>(r));
  return std::pow(static_cast<double>(n), 0.25 * (l + r)) /
         (static_cast<double>(pair_count) * mu_l * mu_r);
}

std::vector<double> pair_products(const PreAveragedSeries& v, int k_n, int l, int r,
                                  double threshold) {
  const int count = v.n - 2 * k_n + 2;
  if (count < 1) throw std::invalid_argument("pair_products: no pairs available");
  std::vector<double> out(static_cast<std::size_t>(count));
  if ((l == 1 || l == 2) && (r == 1 || r == 2)) {
    kern::active().pair_products(v.values.data(), out.size(),
                                 static_cast<std::size_t>(k_n), l, r, threshold,
                                 out.data());
  } else {
    for (int i = 0; i < count; ++i) {
      const double a = std::fabs(v.values[static_cast<std::size_t>(i)]);
      const double b = std::fabs(v.values[static_cast<std::size_t>(i + k_n)]);
      out[static_cast<std::size_t>(i)] =
          a < threshold && b < threshold ? std::pow(a, l) * std::pow(b, r) : 0.0;
    }
  }
  return out;
}

namespace {

BipowerEstimate assemble(const PreAveragedSeries& v, const PreAvgScheme& s, int l,
                         int r, double threshold) {
  BipowerEstimate est;
  est.l = l;
  est.r = r;
  est.pair_count = s.pair_count();
  est.threshold = threshold;
  const std::vector<double> y = pair_products(v, s.k_n, l, r, threshold);
  double sum = 0.0;
  for (double p : y) sum += p;
  est.value = bv_normalizer(s.n, est.pair_count, l, r) * sum;
  if (std::isfinite(threshold)) {
    int cut = 0;
    for (int i = 0; i < est.pair_count; ++i) {
      const double a = std::fabs(v.values[static_cast<std::size_t>(i)]);
      const double b = std::fabs(v.values[static_cast<std::size_t>(i + s.k_n)]);
      if (!(a < threshold && b < threshold)) ++cut;
    }
    est.truncated_pairs = cut;
  }
  return est;
}

}  // namespace

BipowerEstimate bipower(const PreAveragedSeries& v, const PreAvgScheme& s, int l, int r) {
  return assemble(v, s, l, r, std::numeric_limits<double>::infinity());
}

BipowerEstimate truncated_bipower(const PreAveragedSeries& v, const PreAvgScheme& s,
                                  int l, int r, const TruncationRule& rule) {
  return assemble(v, s, l, r, rule.upsilon);
}

TruncationRule adaptive_threshold(const PreAveragedSeries& v, const PreAvgScheme& s,
                                  double varpi, double quantile) {
  if (!(varpi > 0.0 && varpi < 0.5)) {
    throw std::invalid_argument("adaptive_threshold: need varpi in (0, 1/2)");
  }
  if (!(quantile > 0.5 && quantile < 1.0)) {
    throw std::invalid_argument("adaptive_threshold: need quantile in (1/2, 1)");
  }
  const double bv11 = bipower(v, s, 1, 1).value;
  if (!(bv11 > 0.0)) {
    throw data_error("adaptive_threshold: no dispersion in pre-averaged series");
  }
  TruncationRule rule;
  rule.varpi = varpi;
  rule.quantile = quantile;
  rule.scale_c = normal_quantile(quantile) * std::sqrt(bv11);
  const double u_n = static_cast<double>(s.k_n) / s.n;
  rule.upsilon = rule.scale_c * std::pow(u_n, varpi);
  return rule;
}

}  // namespace divolt
