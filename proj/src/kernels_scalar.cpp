#include <cassert>
#include <cmath>

#include "divolt/kernels.hpp"

namespace divolt::kern {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void outer2_scalar(const double* a, const double* b, std::size_t n, double out[3]) {
  double saa = 0.0, sab = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    saa += a[i] * a[i];
    sab += a[i] * b[i];
    sbb += b[i] * b[i];
  }
  out[0] = saa;
  out[1] = sab;
  out[2] = sbb;
}

void weighted_outer2_scalar(const double* u, const double* a, const double* b,
                            std::size_t n, double out[3]) {
  double saa = 0.0, sab = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = u[i] * u[i];
    saa += w * a[i] * a[i];
    sab += w * a[i] * b[i];
    sbb += w * b[i] * b[i];
  }
  out[0] = saa;
  out[1] = sab;
  out[2] = sbb;
}

void weighted_moving_sum_scalar(const double* x, std::size_t n, const double* w,
                                std::size_t k, double* out) {
  assert(k >= 1 && k <= n);
  const std::size_t count = n - k + 1;
  for (std::size_t i = 0; i < count; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += w[j] * x[i + j];
    out[i] = s;
  }
}

inline double abs_pow(double x, int p) {
  const double ax = std::fabs(x);
  return p == 1 ? ax : ax * ax;
}

void pair_products_scalar(const double* v, std::size_t count, std::size_t gap,
                          int l, int r, double threshold, double* out) {
  assert((l == 1 || l == 2) && (r == 1 || r == 2));
  for (std::size_t i = 0; i < count; ++i) {
    const double x = v[i];
    const double y = v[i + gap];
    const bool keep = std::fabs(x) < threshold && std::fabs(y) < threshold;
    out[i] = keep ? abs_pow(x, l) * abs_pow(y, r) : 0.0;
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {dot_scalar,
                          outer2_scalar,
                          weighted_outer2_scalar,
                          weighted_moving_sum_scalar,
                          pair_products_scalar,
                          "scalar"};
  return ops;
}

}  // namespace divolt::kern
