#include "atlift/simd/kernels.hpp"

#include <cmath>
#include <cstddef>

// Scalar reference kernels. These define the semantics; the vector
// variants must match them to rounding error and are tested against them.

namespace atlift::simd {
namespace {

double s_dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double s_sum(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double s_nrm2sq(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

double s_sup_abs_diff(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    if (d > m) m = d;
  }
  return m;
}

void s_axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void s_mul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void s_clamp01(double* a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] < 0.0) a[i] = 0.0;
    if (a[i] > 1.0) a[i] = 1.0;
  }
}

void s_sincos(const double* x, double* s, double* c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = std::sin(x[i]);
    c[i] = std::cos(x[i]);
  }
}

void s_smooth_norm(const double* gx, const double* gy, double eta,
                   double* out, std::size_t n) {
  if (gy) {
    for (std::size_t i = 0; i < n; ++i)
      out[i] = std::sqrt(gx[i] * gx[i] + gy[i] * gy[i] + eta * eta) - eta;
  } else {
    for (std::size_t i = 0; i < n; ++i)
      out[i] = std::sqrt(gx[i] * gx[i] + eta * eta) - eta;
  }
}

void s_inv_norm_scale(const double* gx, const double* gy, double eta,
                      double* cx, double* cy, std::size_t n) {
  if (gy) {
    for (std::size_t i = 0; i < n; ++i) {
      const double r =
          1.0 / std::sqrt(gx[i] * gx[i] + gy[i] * gy[i] + eta * eta);
      cx[i] = gx[i] * r;
      cy[i] = gy[i] * r;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i)
      cx[i] = gx[i] / std::sqrt(gx[i] * gx[i] + eta * eta);
  }
}

void s_map_psi(PsiTag tag, const double* t, double* out, std::size_t n) {
  switch (tag) {
    case PsiTag::quadratic:
      for (std::size_t i = 0; i < n; ++i) out[i] = t[i] * t[i];
      break;
    case PsiTag::linear:
      for (std::size_t i = 0; i < n; ++i) out[i] = t[i];
      break;
  }
}

void s_map_psi_prime(PsiTag tag, const double* t, double* out,
                     std::size_t n) {
  switch (tag) {
    case PsiTag::quadratic:
      for (std::size_t i = 0; i < n; ++i) out[i] = 2.0 * t[i];
      break;
    case PsiTag::linear:
      for (std::size_t i = 0; i < n; ++i) out[i] = 1.0;
      break;
  }
}

void s_map_f(FTag tag, const double* t, double* out, std::size_t n) {
  switch (tag) {
    case FTag::linear:
      for (std::size_t i = 0; i < n; ++i) out[i] = t[i];
      break;
    case FTag::area:
      for (std::size_t i = 0; i < n; ++i)
        out[i] = std::sqrt(1.0 + t[i] * t[i]);
      break;
    case FTag::catenary:
      for (std::size_t i = 0; i < n; ++i)
        out[i] = 2.0 * (std::sqrt(1.0 + 0.25 * t[i] * t[i]) - 1.0);
      break;
  }
}

void s_map_f_prime(FTag tag, const double* t, double* out, std::size_t n) {
  switch (tag) {
    case FTag::linear:
      for (std::size_t i = 0; i < n; ++i) out[i] = 1.0;
      break;
    case FTag::area:
      for (std::size_t i = 0; i < n; ++i)
        out[i] = t[i] / std::sqrt(1.0 + t[i] * t[i]);
      break;
    case FTag::catenary:
      for (std::size_t i = 0; i < n; ++i)
        out[i] = 0.5 * t[i] / std::sqrt(1.0 + 0.25 * t[i] * t[i]);
      break;
  }
}

void s_map_w(WTag tag, const double* s, double* out, std::size_t n) {
  switch (tag) {
    case WTag::quadratic_well:
      for (std::size_t i = 0; i < n; ++i) {
        const double d = 1.0 - s[i];
        out[i] = d * d;
      }
      break;
    case WTag::quartic_well:
      for (std::size_t i = 0; i < n; ++i) {
        const double d = 1.0 - s[i] * s[i];
        out[i] = d * d;
      }
      break;
  }
}

void s_map_w_prime(WTag tag, const double* s, double* out, std::size_t n) {
  switch (tag) {
    case WTag::quadratic_well:
      for (std::size_t i = 0; i < n; ++i) out[i] = 2.0 * (s[i] - 1.0);
      break;
    case WTag::quartic_well:
      for (std::size_t i = 0; i < n; ++i)
        out[i] = -4.0 * s[i] * (1.0 - s[i] * s[i]);
      break;
  }
}

// Nodes are row-major: node(i,j) = p[j*nx + i]. Cell (i,j) has corners
// (i,j),(i+1,j),(i,j+1),(i+1,j+1); cell arrays are row-major (nx-1)*(ny-1).

void s_cell_means_2d(const double* p, std::size_t nx, std::size_t ny,
                     double* out) {
  const std::size_t cx = nx - 1, cy = ny - 1;
  for (std::size_t j = 0; j < cy; ++j) {
    const double* r0 = p + j * nx;
    const double* r1 = p + (j + 1) * nx;
    double* o = out + j * cx;
    for (std::size_t i = 0; i < cx; ++i)
      o[i] = 0.25 * (r0[i] + r0[i + 1] + r1[i] + r1[i + 1]);
  }
}

void s_cell_grads_2d(const double* p, std::size_t nx, std::size_t ny,
                     double hx, double hy, double* gx, double* gy) {
  const std::size_t cx = nx - 1, cy = ny - 1;
  const double ax = 0.5 / hx, ay = 0.5 / hy;
  for (std::size_t j = 0; j < cy; ++j) {
    const double* r0 = p + j * nx;
    const double* r1 = p + (j + 1) * nx;
    double* ox = gx + j * cx;
    double* oy = gy + j * cx;
    for (std::size_t i = 0; i < cx; ++i) {
      ox[i] = ax * ((r0[i + 1] - r0[i]) + (r1[i + 1] - r1[i]));
      oy[i] = ay * ((r1[i] - r0[i]) + (r1[i + 1] - r0[i + 1]));
    }
  }
}

void s_scatter_means_2d(const double* c, std::size_t nx, std::size_t ny,
                        double* nodes) {
  const std::size_t cx = nx - 1, cy = ny - 1;
  for (std::size_t j = 0; j < cy; ++j) {
    const double* q = c + j * cx;
    double* r0 = nodes + j * nx;
    double* r1 = nodes + (j + 1) * nx;
    for (std::size_t i = 0; i < cx; ++i) {
      const double v = 0.25 * q[i];
      r0[i] += v;
      r0[i + 1] += v;
      r1[i] += v;
      r1[i + 1] += v;
    }
  }
}

void s_scatter_grads_2d(const double* cgx, const double* cgy, std::size_t nx,
                        std::size_t ny, double hx, double hy, double* nodes) {
  const std::size_t cx = nx - 1, cy = ny - 1;
  const double ax = 0.5 / hx, ay = 0.5 / hy;
  for (std::size_t j = 0; j < cy; ++j) {
    const double* qx = cgx + j * cx;
    const double* qy = cgy + j * cx;
    double* r0 = nodes + j * nx;
    double* r1 = nodes + (j + 1) * nx;
    for (std::size_t i = 0; i < cx; ++i) {
      const double vx = ax * qx[i];
      const double vy = ay * qy[i];
      r0[i] += -vx - vy;
      r0[i + 1] += vx - vy;
      r1[i] += -vx + vy;
      r1[i + 1] += vx + vy;
    }
  }
}

} // namespace

const Kernels& scalar_kernels() {
  static const Kernels k = {
      s_dot,           s_sum,
      s_nrm2sq,        s_sup_abs_diff,
      s_axpy,          s_mul,
      s_clamp01,       s_sincos,
      s_smooth_norm,   s_inv_norm_scale,
      s_map_psi,       s_map_psi_prime,
      s_map_f,         s_map_f_prime,
      s_map_w,         s_map_w_prime,
      s_cell_means_2d, s_cell_grads_2d,
      s_scatter_means_2d, s_scatter_grads_2d,
      "scalar"};
  return k;
}

} // namespace atlift::simd
