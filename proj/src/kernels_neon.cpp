#include <arm_neon.h>

#include <cassert>
#include <cmath>

#include "divolt/kernels.hpp"

namespace divolt::kern {

namespace {

inline double hsum(float64x2_t v) { return vgetq_lane_f64(v, 0) + vgetq_lane_f64(v, 1); }

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void outer2_neon(const double* a, const double* b, std::size_t n, double out[3]) {
  float64x2_t saa = vdupq_n_f64(0.0);
  float64x2_t sab = vdupq_n_f64(0.0);
  float64x2_t sbb = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t va = vld1q_f64(a + i);
    const float64x2_t vb = vld1q_f64(b + i);
    saa = vfmaq_f64(saa, va, va);
    sab = vfmaq_f64(sab, va, vb);
    sbb = vfmaq_f64(sbb, vb, vb);
  }
  double raa = hsum(saa), rab = hsum(sab), rbb = hsum(sbb);
  for (; i < n; ++i) {
    raa += a[i] * a[i];
    rab += a[i] * b[i];
    rbb += b[i] * b[i];
  }
  out[0] = raa;
  out[1] = rab;
  out[2] = rbb;
}

void weighted_outer2_neon(const double* u, const double* a, const double* b,
                          std::size_t n, double out[3]) {
  float64x2_t saa = vdupq_n_f64(0.0);
  float64x2_t sab = vdupq_n_f64(0.0);
  float64x2_t sbb = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vu = vld1q_f64(u + i);
    const float64x2_t w = vmulq_f64(vu, vu);
    const float64x2_t va = vld1q_f64(a + i);
    const float64x2_t vb = vld1q_f64(b + i);
    const float64x2_t wa = vmulq_f64(w, va);
    const float64x2_t wb = vmulq_f64(w, vb);
    saa = vfmaq_f64(saa, wa, va);
    sab = vfmaq_f64(sab, wa, vb);
    sbb = vfmaq_f64(sbb, wb, vb);
  }
  double raa = hsum(saa), rab = hsum(sab), rbb = hsum(sbb);
  for (; i < n; ++i) {
    const double w = u[i] * u[i];
    raa += w * a[i] * a[i];
    rab += w * a[i] * b[i];
    rbb += w * b[i] * b[i];
  }
  out[0] = raa;
  out[1] = rab;
  out[2] = rbb;
}

void weighted_moving_sum_neon(const double* x, std::size_t n, const double* w,
                              std::size_t k, double* out) {
  assert(k >= 1 && k <= n);
  const std::size_t count = n - k + 1;
  std::size_t i = 0;
  for (; i + 2 <= count; i += 2) {
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t j = 0; j < k; ++j) {
      acc = vfmaq_f64(acc, vdupq_n_f64(w[j]), vld1q_f64(x + i + j));
    }
    vst1q_f64(out + i, acc);
  }
  for (; i < count; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += w[j] * x[i + j];
    out[i] = s;
  }
}

void pair_products_neon(const double* v, std::size_t count, std::size_t gap,
                        int l, int r, double threshold, double* out) {
  assert((l == 1 || l == 2) && (r == 1 || r == 2));
  const float64x2_t thr = vdupq_n_f64(threshold);
  std::size_t i = 0;
  for (; i + 2 <= count; i += 2) {
    const float64x2_t ax = vabsq_f64(vld1q_f64(v + i));
    const float64x2_t ay = vabsq_f64(vld1q_f64(v + i + gap));
    const uint64x2_t keep = vandq_u64(vcltq_f64(ax, thr), vcltq_f64(ay, thr));
    const float64x2_t px = l == 1 ? ax : vmulq_f64(ax, ax);
    const float64x2_t py = r == 1 ? ay : vmulq_f64(ay, ay);
    const float64x2_t prod = vmulq_f64(px, py);
    vst1q_f64(out + i, vreinterpretq_f64_u64(
                           vandq_u64(vreinterpretq_u64_f64(prod), keep)));
  }
  for (; i < count; ++i) {
    const double ax = std::fabs(v[i]);
    const double ay = std::fabs(v[i + gap]);
    const bool keep = ax < threshold && ay < threshold;
    const double px = l == 1 ? ax : ax * ax;
    const double py = r == 1 ? ay : ay * ay;
    out[i] = keep ? px * py : 0.0;
  }
}

}  // namespace

const Ops& neon_ops() {
  static const Ops ops = {dot_neon,
                          outer2_neon,
                          weighted_outer2_neon,
                          weighted_moving_sum_neon,
                          pair_products_neon,
                          "neon"};
  return ops;
}

}  // namespace divolt::kern
