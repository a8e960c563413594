#include "atlift/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstddef>

// AVX2+FMA variants of the scalar kernels. This translation unit is built
// with -mavx2 -mfma; callers must check avx2_available() before selecting
// the set. Lane accumulators are combined in a fixed order so results are
// reproducible run to run.

namespace atlift::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double a_dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  double r = hsum(acc);
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

double a_sum(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double r = hsum(acc);
  for (; i < n; ++i) r += a[i];
  return r;
}

double a_nrm2sq(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(a + i);
    acc = _mm256_fmadd_pd(x, x, acc);
  }
  double r = hsum(acc);
  for (; i < n; ++i) r += a[i] * a[i];
  return r;
}

double a_sup_abs_diff(const double* a, const double* b, std::size_t n) {
  const __m256d signmask = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    m = _mm256_max_pd(m, _mm256_andnot_pd(signmask, d));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, m);
  double r = lane[0];
  for (int k = 1; k < 4; ++k)
    if (lane[k] > r) r = lane[k];
  for (; i < n; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    if (d > r) r = d;
  }
  return r;
}

void a_axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                               _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void a_mul(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void a_clamp01(double* a, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        a + i, _mm256_min_pd(one, _mm256_max_pd(zero, _mm256_loadu_pd(a + i))));
  for (; i < n; ++i) {
    if (a[i] < 0.0) a[i] = 0.0;
    if (a[i] > 1.0) a[i] = 1.0;
  }
}

void a_smooth_norm(const double* gx, const double* gy, double eta,
                   double* out, std::size_t n) {
  const __m256d e2 = _mm256_set1_pd(eta * eta);
  const __m256d e = _mm256_set1_pd(eta);
  std::size_t i = 0;
  if (gy) {
    for (; i + 4 <= n; i += 4) {
      const __m256d x = _mm256_loadu_pd(gx + i);
      const __m256d y = _mm256_loadu_pd(gy + i);
      const __m256d s = _mm256_fmadd_pd(x, x, _mm256_fmadd_pd(y, y, e2));
      _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_sqrt_pd(s), e));
    }
    for (; i < n; ++i)
      out[i] = std::sqrt(gx[i] * gx[i] + gy[i] * gy[i] + eta * eta) - eta;
  } else {
    for (; i + 4 <= n; i += 4) {
      const __m256d x = _mm256_loadu_pd(gx + i);
      const __m256d s = _mm256_fmadd_pd(x, x, e2);
      _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_sqrt_pd(s), e));
    }
    for (; i < n; ++i) out[i] = std::sqrt(gx[i] * gx[i] + eta * eta) - eta;
  }
}

void a_inv_norm_scale(const double* gx, const double* gy, double eta,
                      double* cx, double* cy, std::size_t n) {
  const __m256d e2 = _mm256_set1_pd(eta * eta);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  if (gy) {
    for (; i + 4 <= n; i += 4) {
      const __m256d x = _mm256_loadu_pd(gx + i);
      const __m256d y = _mm256_loadu_pd(gy + i);
      const __m256d s = _mm256_fmadd_pd(x, x, _mm256_fmadd_pd(y, y, e2));
      const __m256d r = _mm256_div_pd(one, _mm256_sqrt_pd(s));
      _mm256_storeu_pd(cx + i, _mm256_mul_pd(x, r));
      _mm256_storeu_pd(cy + i, _mm256_mul_pd(y, r));
    }
    for (; i < n; ++i) {
      const double r =
          1.0 / std::sqrt(gx[i] * gx[i] + gy[i] * gy[i] + eta * eta);
      cx[i] = gx[i] * r;
      cy[i] = gy[i] * r;
    }
  } else {
    for (; i + 4 <= n; i += 4) {
      const __m256d x = _mm256_loadu_pd(gx + i);
      const __m256d s = _mm256_fmadd_pd(x, x, e2);
      _mm256_storeu_pd(cx + i, _mm256_div_pd(x, _mm256_sqrt_pd(s)));
    }
    for (; i < n; ++i) cx[i] = gx[i] / std::sqrt(gx[i] * gx[i] + eta * eta);
  }
}

void a_map_psi(PsiTag tag, const double* t, double* out, std::size_t n) {
  std::size_t i = 0;
  switch (tag) {
    case PsiTag::quadratic:
      for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(t + i);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(x, x));
      }
      for (; i < n; ++i) out[i] = t[i] * t[i];
      break;
    case PsiTag::linear:
      for (; i < n; ++i) out[i] = t[i];
      break;
  }
}

void a_map_psi_prime(PsiTag tag, const double* t, double* out,
                     std::size_t n) {
  std::size_t i = 0;
  switch (tag) {
    case PsiTag::quadratic: {
      const __m256d two = _mm256_set1_pd(2.0);
      for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(two, _mm256_loadu_pd(t + i)));
      for (; i < n; ++i) out[i] = 2.0 * t[i];
      break;
    }
    case PsiTag::linear:
      for (; i < n; ++i) out[i] = 1.0;
      break;
  }
}

void a_map_f(FTag tag, const double* t, double* out, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  switch (tag) {
    case FTag::linear:
      for (; i < n; ++i) out[i] = t[i];
      break;
    case FTag::area:
      for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(t + i);
        _mm256_storeu_pd(out + i,
                         _mm256_sqrt_pd(_mm256_fmadd_pd(x, x, one)));
      }
      for (; i < n; ++i) out[i] = std::sqrt(1.0 + t[i] * t[i]);
      break;
    case FTag::catenary: {
      const __m256d q = _mm256_set1_pd(0.25);
      const __m256d two = _mm256_set1_pd(2.0);
      for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(t + i);
        const __m256d s =
            _mm256_sqrt_pd(_mm256_fmadd_pd(_mm256_mul_pd(q, x), x, one));
        _mm256_storeu_pd(out + i, _mm256_mul_pd(two, _mm256_sub_pd(s, one)));
      }
      for (; i < n; ++i)
        out[i] = 2.0 * (std::sqrt(1.0 + 0.25 * t[i] * t[i]) - 1.0);
      break;
    }
  }
}

void a_map_f_prime(FTag tag, const double* t, double* out, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  switch (tag) {
    case FTag::linear:
      for (; i < n; ++i) out[i] = 1.0;
      break;
    case FTag::area:
      for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(t + i);
        const __m256d s = _mm256_sqrt_pd(_mm256_fmadd_pd(x, x, one));
        _mm256_storeu_pd(out + i, _mm256_div_pd(x, s));
      }
      for (; i < n; ++i) out[i] = t[i] / std::sqrt(1.0 + t[i] * t[i]);
      break;
    case FTag::catenary: {
      const __m256d q = _mm256_set1_pd(0.25);
      const __m256d half = _mm256_set1_pd(0.5);
      for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(t + i);
        const __m256d s =
            _mm256_sqrt_pd(_mm256_fmadd_pd(_mm256_mul_pd(q, x), x, one));
        _mm256_storeu_pd(out + i,
                         _mm256_div_pd(_mm256_mul_pd(half, x), s));
      }
      for (; i < n; ++i)
        out[i] = 0.5 * t[i] / std::sqrt(1.0 + 0.25 * t[i] * t[i]);
      break;
    }
  }
}

void a_map_w(WTag tag, const double* s, double* out, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  switch (tag) {
    case WTag::quadratic_well:
      for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(one, _mm256_loadu_pd(s + i));
        _mm256_storeu_pd(out + i, _mm256_mul_pd(d, d));
      }
      for (; i < n; ++i) {
        const double d = 1.0 - s[i];
        out[i] = d * d;
      }
      break;
    case WTag::quartic_well:
      for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(s + i);
        const __m256d d = _mm256_sub_pd(one, _mm256_mul_pd(x, x));
        _mm256_storeu_pd(out + i, _mm256_mul_pd(d, d));
      }
      for (; i < n; ++i) {
        const double d = 1.0 - s[i] * s[i];
        out[i] = d * d;
      }
      break;
  }
}

void a_map_w_prime(WTag tag, const double* s, double* out, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  switch (tag) {
    case WTag::quadratic_well: {
      const __m256d two = _mm256_set1_pd(2.0);
      for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(
            out + i,
            _mm256_mul_pd(two, _mm256_sub_pd(_mm256_loadu_pd(s + i), one)));
      for (; i < n; ++i) out[i] = 2.0 * (s[i] - 1.0);
      break;
    }
    case WTag::quartic_well: {
      const __m256d m4 = _mm256_set1_pd(-4.0);
      for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(s + i);
        const __m256d d = _mm256_sub_pd(one, _mm256_mul_pd(x, x));
        _mm256_storeu_pd(out + i,
                         _mm256_mul_pd(_mm256_mul_pd(m4, x), d));
      }
      for (; i < n; ++i) out[i] = -4.0 * s[i] * (1.0 - s[i] * s[i]);
      break;
    }
  }
}

void a_cell_means_2d(const double* p, std::size_t nx, std::size_t ny,
                     double* out) {
  const std::size_t cx = nx - 1, cy = ny - 1;
  const __m256d q = _mm256_set1_pd(0.25);
  for (std::size_t j = 0; j < cy; ++j) {
    const double* r0 = p + j * nx;
    const double* r1 = p + (j + 1) * nx;
    double* o = out + j * cx;
    std::size_t i = 0;
    for (; i + 4 <= cx; i += 4) {
      const __m256d a = _mm256_add_pd(_mm256_loadu_pd(r0 + i),
                                      _mm256_loadu_pd(r0 + i + 1));
      const __m256d b = _mm256_add_pd(_mm256_loadu_pd(r1 + i),
                                      _mm256_loadu_pd(r1 + i + 1));
      _mm256_storeu_pd(o + i, _mm256_mul_pd(q, _mm256_add_pd(a, b)));
    }
    for (; i < cx; ++i)
      o[i] = 0.25 * (r0[i] + r0[i + 1] + r1[i] + r1[i + 1]);
  }
}

void a_cell_grads_2d(const double* p, std::size_t nx, std::size_t ny,
                     double hx, double hy, double* gx, double* gy) {
  const std::size_t cx = nx - 1, cy = ny - 1;
  const double ax = 0.5 / hx, ay = 0.5 / hy;
  const __m256d vax = _mm256_set1_pd(ax);
  const __m256d vay = _mm256_set1_pd(ay);
  for (std::size_t j = 0; j < cy; ++j) {
    const double* r0 = p + j * nx;
    const double* r1 = p + (j + 1) * nx;
    double* ox = gx + j * cx;
    double* oy = gy + j * cx;
    std::size_t i = 0;
    for (; i + 4 <= cx; i += 4) {
      const __m256d a00 = _mm256_loadu_pd(r0 + i);
      const __m256d a10 = _mm256_loadu_pd(r0 + i + 1);
      const __m256d a01 = _mm256_loadu_pd(r1 + i);
      const __m256d a11 = _mm256_loadu_pd(r1 + i + 1);
      _mm256_storeu_pd(
          ox + i, _mm256_mul_pd(vax, _mm256_add_pd(_mm256_sub_pd(a10, a00),
                                                   _mm256_sub_pd(a11, a01))));
      _mm256_storeu_pd(
          oy + i, _mm256_mul_pd(vay, _mm256_add_pd(_mm256_sub_pd(a01, a00),
                                                   _mm256_sub_pd(a11, a10))));
    }
    for (; i < cx; ++i) {
      ox[i] = ax * ((r0[i + 1] - r0[i]) + (r1[i + 1] - r1[i]));
      oy[i] = ay * ((r1[i] - r0[i]) + (r1[i + 1] - r0[i + 1]));
    }
  }
}

// Scatters accumulate into overlapping node windows; doing the four corner
// shifts as separate vector passes keeps lanes conflict-free.
void a_scatter_means_2d(const double* c, std::size_t nx, std::size_t ny,
                        double* nodes) {
  const std::size_t cx = nx - 1, cy = ny - 1;
  const __m256d q = _mm256_set1_pd(0.25);
  for (std::size_t j = 0; j < cy; ++j) {
    const double* src = c + j * cx;
    for (int corner = 0; corner < 4; ++corner) {
      double* dst = nodes + (j + (corner >> 1)) * nx + (corner & 1);
      std::size_t i = 0;
      for (; i + 4 <= cx; i += 4)
        _mm256_storeu_pd(
            dst + i, _mm256_fmadd_pd(q, _mm256_loadu_pd(src + i),
                                     _mm256_loadu_pd(dst + i)));
      for (; i < cx; ++i) dst[i] += 0.25 * src[i];
    }
  }
}

void a_scatter_grads_2d(const double* cgx, const double* cgy, std::size_t nx,
                        std::size_t ny, double hx, double hy, double* nodes) {
  const std::size_t cx = nx - 1, cy = ny - 1;
  const double ax = 0.5 / hx, ay = 0.5 / hy;
  // corner (di,dj) weight: (di? +ax : -ax) for x, (dj? +ay : -ay) for y
  for (std::size_t j = 0; j < cy; ++j) {
    const double* qx = cgx + j * cx;
    const double* qy = cgy + j * cx;
    for (int corner = 0; corner < 4; ++corner) {
      const double wx = (corner & 1) ? ax : -ax;
      const double wy = (corner >> 1) ? ay : -ay;
      const __m256d vwx = _mm256_set1_pd(wx);
      const __m256d vwy = _mm256_set1_pd(wy);
      double* dst = nodes + (j + (corner >> 1)) * nx + (corner & 1);
      std::size_t i = 0;
      for (; i + 4 <= cx; i += 4) {
        __m256d acc = _mm256_loadu_pd(dst + i);
        acc = _mm256_fmadd_pd(vwx, _mm256_loadu_pd(qx + i), acc);
        acc = _mm256_fmadd_pd(vwy, _mm256_loadu_pd(qy + i), acc);
        _mm256_storeu_pd(dst + i, acc);
      }
      for (; i < cx; ++i) dst[i] += wx * qx[i] + wy * qy[i];
    }
  }
}

} // namespace

const Kernels& avx2_kernels() {
  static const Kernels k = {
      a_dot,           a_sum,
      a_nrm2sq,        a_sup_abs_diff,
      a_axpy,          a_mul,
      a_clamp01,       a_smooth_norm,
      a_inv_norm_scale, a_map_psi,
      a_map_psi_prime, a_map_f,
      a_map_f_prime,   a_map_w,
      a_map_w_prime,   a_cell_means_2d,
      a_cell_grads_2d, a_scatter_means_2d,
      a_scatter_grads_2d, "avx2"};
  return k;
}

bool avx2_available() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

} // namespace atlift::simd

#endif // x86-64
