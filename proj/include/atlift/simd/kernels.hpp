#pragma once

// Data-parallel inner-loop kernels for the grid energies and solvers.
//
// Every kernel exists as a scalar reference implementation; on x86-64 an
// AVX2+FMA variant is selected at runtime when the CPU supports it, on
// aarch64 a NEON variant is compiled in. The active set can be overridden
// with the ATLIFT_SIMD environment variable ("scalar", "avx2", "neon",
// "auto"). All variants reduce in a fixed deterministic order, so repeated
// runs of the same binary produce identical bytes; scalar and vector paths
// are equivalence-tested against each other to tight relative tolerance.

#include <cstddef>

namespace atlift::simd {

// Tags for the closed-form model functions the vector kernels specialize
// on. Generic callables fall back to the scalar path in functions.cpp.
enum class PsiTag { quadratic, linear };
enum class FTag { linear, area, catenary };
enum class WTag { quadratic_well, quartic_well };

struct Kernels {
  // reductions
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*nrm2sq)(const double*, std::size_t);
  double (*sup_abs_diff)(const double*, const double*, std::size_t);

  // elementwise maps
  void (*axpy)(double, const double*, double*, std::size_t);       // y += a*x
  void (*mul)(const double*, const double*, double*, std::size_t); // out = a.*b
  void (*clamp01)(double*, std::size_t);
  // s = sin(x), c = cos(x); |x| up to ~1e6, absolute error < 1e-13
  void (*sincos)(const double*, double*, double*, std::size_t);
  // out = sqrt(gx^2 + gy^2 + eta^2) - eta   (gy may be null in 1-D)
  void (*smooth_norm)(const double*, const double*, double, double*,
                      std::size_t);
  // cx = gx / sqrt(gx^2+gy^2+eta^2), cy likewise (cy/gy null in 1-D)
  void (*inv_norm_scale)(const double*, const double*, double, double*,
                         double*, std::size_t);
  void (*map_psi)(PsiTag, const double*, double*, std::size_t);
  void (*map_psi_prime)(PsiTag, const double*, double*, std::size_t);
  void (*map_f)(FTag, const double*, double*, std::size_t);
  void (*map_f_prime)(FTag, const double*, double*, std::size_t);
  void (*map_w)(WTag, const double*, double*, std::size_t);
  void (*map_w_prime)(WTag, const double*, double*, std::size_t);

  // grid transfers (2-D, row-major nodes nx*ny, cells (nx-1)*(ny-1))
  void (*cell_means_2d)(const double*, std::size_t, std::size_t, double*);
  void (*cell_grads_2d)(const double*, std::size_t, std::size_t, double,
                        double, double*, double*);
  // adjoints of the two transfers: accumulate cell quantities into nodes
  void (*scatter_means_2d)(const double*, std::size_t, std::size_t, double*);
  void (*scatter_grads_2d)(const double*, const double*, std::size_t,
                           std::size_t, double, double, double*);

  const char* name;
};

// The kernel set active for this process (resolved once, thread-safe).
const Kernels& active();

// Named sets, for equivalence tests and benchmarks.
const Kernels& scalar_kernels();
#if defined(__x86_64__) || defined(_M_X64)
bool avx2_available();
const Kernels& avx2_kernels();
#endif
#if defined(__aarch64__) || defined(__ARM_NEON)
const Kernels& neon_kernels();
#endif

} // namespace atlift::simd
