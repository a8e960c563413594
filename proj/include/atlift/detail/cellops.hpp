#pragma once

// Discrete building blocks shared by the energy evaluators and the
// minimization steps: node->cell transfers (means and bilinear-center
// gradients), their adjoints, and tag-dispatched maps of the model
// functions. 2-D paths run on the runtime-selected SIMD kernel set; 1-D
// grids are small and use plain loops.

#include <cstddef>
#include <vector>

#include "atlift/fields.hpp"
#include "atlift/functions.hpp"
#include "atlift/grid.hpp"
#include "atlift/simd/kernels.hpp"

namespace atlift::detail {

inline void cell_means(const GridSpec& g, const double* nodes, double* out) {
  if (g.dim == 2) {
    simd::active().cell_means_2d(nodes, g.res[0], g.res[1], out);
    return;
  }
  for (std::size_t i = 0; i + 1 < g.res[0]; ++i)
    out[i] = 0.5 * (nodes[i] + nodes[i + 1]);
}

// 1-D writes gx only; callers pass gy for 2-D grids.
inline void cell_grads(const GridSpec& g, const double* nodes, double* gx,
                       double* gy) {
  if (g.dim == 2) {
    simd::active().cell_grads_2d(nodes, g.res[0], g.res[1], g.h(0), g.h(1),
                                 gx, gy);
    return;
  }
  const double inv_h = 1.0 / g.h(0);
  for (std::size_t i = 0; i + 1 < g.res[0]; ++i)
    gx[i] = (nodes[i + 1] - nodes[i]) * inv_h;
}

inline void scatter_means(const GridSpec& g, const double* cells,
                          double* nodes) {
  if (g.dim == 2) {
    simd::active().scatter_means_2d(cells, g.res[0], g.res[1], nodes);
    return;
  }
  for (std::size_t i = 0; i + 1 < g.res[0]; ++i) {
    nodes[i] += 0.5 * cells[i];
    nodes[i + 1] += 0.5 * cells[i];
  }
}

inline void scatter_grads(const GridSpec& g, const double* cx,
                          const double* cy, double* nodes) {
  if (g.dim == 2) {
    simd::active().scatter_grads_2d(cx, cy, g.res[0], g.res[1], g.h(0),
                                    g.h(1), nodes);
    return;
  }
  const double inv_h = 1.0 / g.h(0);
  for (std::size_t i = 0; i + 1 < g.res[0]; ++i) {
    nodes[i] -= cx[i] * inv_h;
    nodes[i + 1] += cx[i] * inv_h;
  }
}

inline void map_psi(const PsiSpec& psi, const double* in, double* out,
                    std::size_t n) {
  if (psi.kernel) {
    simd::active().map_psi(*psi.kernel, in, out, n);
    return;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = psi.value(in[i]);
}

inline void map_psi_prime(const PsiSpec& psi, const double* in, double* out,
                          std::size_t n) {
  if (psi.kernel) {
    simd::active().map_psi_prime(*psi.kernel, in, out, n);
    return;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = psi.deriv(in[i]);
}

inline void map_f(const FSpec& f, const double* in, double* out,
                  std::size_t n) {
  if (f.kernel) {
    simd::active().map_f(*f.kernel, in, out, n);
    return;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = f.value(in[i]);
}

inline void map_f_prime(const FSpec& f, const double* in, double* out,
                        std::size_t n) {
  if (f.kernel) {
    simd::active().map_f_prime(*f.kernel, in, out, n);
    return;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = f.deriv(in[i]);
}

inline void map_w(const WSpec& w, const double* in, double* out,
                  std::size_t n) {
  if (w.kernel) {
    simd::active().map_w(*w.kernel, in, out, n);
    return;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = w.value(in[i]);
}

inline void map_w_prime(const WSpec& w, const double* in, double* out,
                        std::size_t n) {
  if (w.kernel) {
    simd::active().map_w_prime(*w.kernel, in, out, n);
    return;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = w.deriv(in[i]);
}

// Scratch buffers sized for one grid; reused across solver iterations.
struct Workspace {
  std::vector<double> c0, c1, c2, c3, c4, c5, c6, c7;
  std::vector<double> n0, n1, n2, n3;

  void ensure(const GridSpec& g) {
    const std::size_t nc = g.cells(), nn = g.nodes();
    for (auto* v : {&c0, &c1, &c2, &c3, &c4, &c5, &c6, &c7})
      if (v->size() < nc) v->assign(nc, 0.0);
    for (auto* v : {&n0, &n1, &n2, &n3})
      if (v->size() < nn) v->assign(nn, 0.0);
  }
};

} // namespace atlift::detail
