#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "atlift/simd/kernels.hpp"

using namespace atlift::simd;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n,
                               double lo = -2.0, double hi = 2.0) {
  std::vector<double> v(n);
  for (double& x : v)
    x = lo + (hi - lo) * static_cast<double>(rng() >> 11) / 9007199254740992.0;
  return v;
}

bool close_rel(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

// Compare a candidate kernel set against the scalar reference on random
// data, including awkward lengths around the vector width.
void check_equivalence(const Kernels& k, const Kernels& ref) {
  std::mt19937_64 rng(42);
  for (const std::size_t n : {std::size_t(1), std::size_t(3), std::size_t(4),
                              std::size_t(7), std::size_t(64),
                              std::size_t(1001)}) {
    const auto a = random_vec(rng, n);
    const auto b = random_vec(rng, n);
    CHECK(close_rel(k.dot(a.data(), b.data(), n),
                    ref.dot(a.data(), b.data(), n), 1e-13));
    CHECK(close_rel(k.sum(a.data(), n), ref.sum(a.data(), n), 1e-13));
    CHECK(close_rel(k.nrm2sq(a.data(), n), ref.nrm2sq(a.data(), n), 1e-13));
    CHECK(k.sup_abs_diff(a.data(), b.data(), n) ==
          ref.sup_abs_diff(a.data(), b.data(), n));

    auto y1 = b, y2 = b;
    k.axpy(0.37, a.data(), y1.data(), n);
    ref.axpy(0.37, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]));

    std::vector<double> o1(n), o2(n);
    k.mul(a.data(), b.data(), o1.data(), n);
    ref.mul(a.data(), b.data(), o2.data(), n);
    CHECK(o1 == o2);

    auto c1 = a, c2 = a;
    k.clamp01(c1.data(), n);
    ref.clamp01(c2.data(), n);
    CHECK(c1 == c2);

    k.smooth_norm(a.data(), b.data(), 1e-6, o1.data(), n);
    ref.smooth_norm(a.data(), b.data(), 1e-6, o2.data(), n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(close_rel(o1[i], o2[i], 1e-14));
    k.smooth_norm(a.data(), nullptr, 1e-6, o1.data(), n);
    ref.smooth_norm(a.data(), nullptr, 1e-6, o2.data(), n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(close_rel(o1[i], o2[i], 1e-14));

    std::vector<double> p1(n), p2(n), q1(n), q2(n);
    k.inv_norm_scale(a.data(), b.data(), 1e-6, p1.data(), q1.data(), n);
    ref.inv_norm_scale(a.data(), b.data(), 1e-6, p2.data(), q2.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(close_rel(p1[i], p2[i], 1e-14));
      CHECK(close_rel(q1[i], q2[i], 1e-14));
    }

    for (const PsiTag tag : {PsiTag::quadratic, PsiTag::linear}) {
      k.map_psi(tag, c1.data(), o1.data(), n);
      ref.map_psi(tag, c1.data(), o2.data(), n);
      CHECK(o1 == o2);
    }
    for (const FTag tag : {FTag::linear, FTag::area, FTag::catenary}) {
      k.map_f(tag, a.data(), o1.data(), n);
      ref.map_f(tag, a.data(), o2.data(), n);
      for (std::size_t i = 0; i < n; ++i)
        CHECK(close_rel(o1[i], o2[i], 1e-14));
      k.map_f_prime(tag, a.data(), o1.data(), n);
      ref.map_f_prime(tag, a.data(), o2.data(), n);
      for (std::size_t i = 0; i < n; ++i)
        CHECK(close_rel(o1[i], o2[i], 1e-14));
    }
    for (const WTag tag : {WTag::quadratic_well, WTag::quartic_well}) {
      k.map_w(tag, c1.data(), o1.data(), n);
      ref.map_w(tag, c1.data(), o2.data(), n);
      for (std::size_t i = 0; i < n; ++i)
        CHECK(close_rel(o1[i], o2[i], 1e-14));
      k.map_w_prime(tag, c1.data(), o1.data(), n);
      ref.map_w_prime(tag, c1.data(), o2.data(), n);
      for (std::size_t i = 0; i < n; ++i)
        CHECK(close_rel(o1[i], o2[i], 1e-14));
    }
  }

  // grid transfer kernels on a few odd shapes
  for (const auto [nx, ny] : {std::pair<std::size_t, std::size_t>{2, 2},
                              {5, 3},
                              {9, 9},
                              {34, 7}}) {
    const std::size_t cells = (nx - 1) * (ny - 1);
    const auto p = random_vec(rng, nx * ny);
    std::vector<double> m1(cells), m2(cells), gx1(cells), gx2(cells),
        gy1(cells), gy2(cells);
    k.cell_means_2d(p.data(), nx, ny, m1.data());
    ref.cell_means_2d(p.data(), nx, ny, m2.data());
    for (std::size_t i = 0; i < cells; ++i)
      CHECK(close_rel(m1[i], m2[i], 1e-14));
    k.cell_grads_2d(p.data(), nx, ny, 0.1, 0.2, gx1.data(), gy1.data());
    ref.cell_grads_2d(p.data(), nx, ny, 0.1, 0.2, gx2.data(), gy2.data());
    for (std::size_t i = 0; i < cells; ++i) {
      CHECK(close_rel(gx1[i], gx2[i], 1e-13));
      CHECK(close_rel(gy1[i], gy2[i], 1e-13));
    }
    const auto c = random_vec(rng, cells);
    std::vector<double> s1(nx * ny, 0.0), s2(nx * ny, 0.0);
    k.scatter_means_2d(c.data(), nx, ny, s1.data());
    ref.scatter_means_2d(c.data(), nx, ny, s2.data());
    for (std::size_t i = 0; i < nx * ny; ++i)
      CHECK(close_rel(s1[i], s2[i], 1e-13));
    const auto cy = random_vec(rng, cells);
    std::fill(s1.begin(), s1.end(), 0.0);
    std::fill(s2.begin(), s2.end(), 0.0);
    k.scatter_grads_2d(c.data(), cy.data(), nx, ny, 0.1, 0.2, s1.data());
    ref.scatter_grads_2d(c.data(), cy.data(), nx, ny, 0.1, 0.2, s2.data());
    for (std::size_t i = 0; i < nx * ny; ++i)
      CHECK(close_rel(s1[i], s2[i], 1e-13));
  }
}

} // namespace

TEST_CASE("active kernel set matches the scalar reference") {
  check_equivalence(active(), scalar_kernels());
}

#if defined(__x86_64__) || defined(_M_X64)
TEST_CASE("avx2 kernels match the scalar reference") {
  if (!avx2_available()) return;
  check_equivalence(avx2_kernels(), scalar_kernels());
}
#endif

#if defined(__aarch64__) || defined(__ARM_NEON)
TEST_CASE("neon kernels match the scalar reference") {
  check_equivalence(neon_kernels(), scalar_kernels());
}
#endif

TEST_CASE("scatter kernels are adjoint to the transfer kernels") {
  // <cell_means(p), c> == <p, scatter_means(c)> and likewise for grads
  std::mt19937_64 rng(7);
  const std::size_t nx = 13, ny = 8;
  const std::size_t cells = (nx - 1) * (ny - 1);
  const auto& k = active();
  const auto p = random_vec(rng, nx * ny);
  const auto c = random_vec(rng, cells);
  std::vector<double> m(cells);
  k.cell_means_2d(p.data(), nx, ny, m.data());
  std::vector<double> s(nx * ny, 0.0);
  k.scatter_means_2d(c.data(), nx, ny, s.data());
  CHECK(k.dot(m.data(), c.data(), cells) ==
        doctest::Approx(k.dot(p.data(), s.data(), nx * ny)).epsilon(1e-12));

  const auto cx = random_vec(rng, cells);
  const auto cy = random_vec(rng, cells);
  std::vector<double> gx(cells), gy(cells);
  k.cell_grads_2d(p.data(), nx, ny, 0.3, 0.7, gx.data(), gy.data());
  std::fill(s.begin(), s.end(), 0.0);
  k.scatter_grads_2d(cx.data(), cy.data(), nx, ny, 0.3, 0.7, s.data());
  const double lhs =
      k.dot(gx.data(), cx.data(), cells) + k.dot(gy.data(), cy.data(), cells);
  CHECK(lhs == doctest::Approx(k.dot(p.data(), s.data(), nx * ny))
                   .epsilon(1e-12));
}
