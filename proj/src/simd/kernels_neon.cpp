#include "atlift/simd/kernels.hpp"

#if defined(__aarch64__) || defined(__ARM_NEON)

#include <arm_neon.h>

#include <cmath>
#include <cstddef>

// NEON (float64x2) variants for the reduction and map kernels; the grid
// transfer kernels reuse the scalar reference implementations.

namespace atlift::simd {
namespace {

double n_dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
  double r = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

double n_sum(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(a + i));
  double r = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) r += a[i];
  return r;
}

double n_nrm2sq(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t x = vld1q_f64(a + i);
    acc = vfmaq_f64(acc, x, x);
  }
  double r = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) r += a[i] * a[i];
  return r;
}

double n_sup_abs_diff(const double* a, const double* b, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    m = vmaxq_f64(m, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  double r = vgetq_lane_f64(m, 0);
  if (vgetq_lane_f64(m, 1) > r) r = vgetq_lane_f64(m, 1);
  for (; i < n; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    if (d > r) r = d;
  }
  return r;
}

void n_axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void n_mul(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void n_clamp01(double* a, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  const float64x2_t one = vdupq_n_f64(1.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(a + i, vminq_f64(one, vmaxq_f64(zero, vld1q_f64(a + i))));
  for (; i < n; ++i) {
    if (a[i] < 0.0) a[i] = 0.0;
    if (a[i] > 1.0) a[i] = 1.0;
  }
}

void n_smooth_norm(const double* gx, const double* gy, double eta,
                   double* out, std::size_t n) {
  const float64x2_t e2 = vdupq_n_f64(eta * eta);
  const float64x2_t e = vdupq_n_f64(eta);
  std::size_t i = 0;
  if (gy) {
    for (; i + 2 <= n; i += 2) {
      const float64x2_t x = vld1q_f64(gx + i);
      const float64x2_t y = vld1q_f64(gy + i);
      const float64x2_t s = vfmaq_f64(vfmaq_f64(e2, y, y), x, x);
      vst1q_f64(out + i, vsubq_f64(vsqrtq_f64(s), e));
    }
    for (; i < n; ++i)
      out[i] = std::sqrt(gx[i] * gx[i] + gy[i] * gy[i] + eta * eta) - eta;
  } else {
    for (; i + 2 <= n; i += 2) {
      const float64x2_t x = vld1q_f64(gx + i);
      vst1q_f64(out + i, vsubq_f64(vsqrtq_f64(vfmaq_f64(e2, x, x)), e));
    }
    for (; i < n; ++i) out[i] = std::sqrt(gx[i] * gx[i] + eta * eta) - eta;
  }
}

void n_inv_norm_scale(const double* gx, const double* gy, double eta,
                      double* cx, double* cy, std::size_t n) {
  const float64x2_t e2 = vdupq_n_f64(eta * eta);
  std::size_t i = 0;
  if (gy) {
    for (; i + 2 <= n; i += 2) {
      const float64x2_t x = vld1q_f64(gx + i);
      const float64x2_t y = vld1q_f64(gy + i);
      const float64x2_t s = vsqrtq_f64(vfmaq_f64(vfmaq_f64(e2, y, y), x, x));
      vst1q_f64(cx + i, vdivq_f64(x, s));
      vst1q_f64(cy + i, vdivq_f64(y, s));
    }
    for (; i < n; ++i) {
      const double r =
          1.0 / std::sqrt(gx[i] * gx[i] + gy[i] * gy[i] + eta * eta);
      cx[i] = gx[i] * r;
      cy[i] = gy[i] * r;
    }
  } else {
    for (; i + 2 <= n; i += 2) {
      const float64x2_t x = vld1q_f64(gx + i);
      vst1q_f64(cx + i, vdivq_f64(x, vsqrtq_f64(vfmaq_f64(e2, x, x))));
    }
    for (; i < n; ++i) cx[i] = gx[i] / std::sqrt(gx[i] * gx[i] + eta * eta);
  }
}

} // namespace

const Kernels& neon_kernels() {
  const Kernels& s = scalar_kernels();
  static const Kernels k = {
      n_dot,           n_sum,
      n_nrm2sq,        n_sup_abs_diff,
      n_axpy,          n_mul,
      n_clamp01,       n_smooth_norm,
      n_inv_norm_scale, s.map_psi,
      s.map_psi_prime, s.map_f,
      s.map_f_prime,   s.map_w,
      s.map_w_prime,   s.cell_means_2d,
      s.cell_grads_2d, s.scatter_means_2d,
      s.scatter_grads_2d, "neon"};
  return k;
}

} // namespace atlift::simd

#endif // aarch64
