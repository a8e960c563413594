#include "atlift/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "atlift/detail/cellops.hpp"
#include "atlift/errors.hpp"

namespace atlift {

void Schedule::validate() const {
  if (epsilons.empty()) throw ConfigError("schedule needs >= 1 epsilon");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) throw ConfigError("epsilons must be > 0");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
      throw ConfigError("epsilons must be strictly decreasing");
  }
  if (!(tol_energy > 0.0) || !(tol_step > 0.0))
    throw ConfigError("tolerances must be > 0");
  if (max_outer_iters == 0) throw ConfigError("max_outer_iters must be >= 1");
}

MinimizeMode parse_mode(const std::string& tag) {
  if (tag == "lifting") return MinimizeMode::lifting;
  if (tag == "direct") return MinimizeMode::direct;
  throw ConfigError("unknown minimize mode: " + tag);
}

std::vector<std::uint8_t> boundary_pin_mask(const GridSpec& grid) {
  std::vector<std::uint8_t> pin(grid.nodes(), 0);
  if (grid.dim == 1) {
    pin.front() = 1;
    pin.back() = 1;
    return pin;
  }
  for (std::size_t i = 0; i < grid.res[0]; ++i) {
    pin[grid.node_index(i, 0)] = 1;
    pin[grid.node_index(i, grid.res[1] - 1)] = 1;
  }
  for (std::size_t j = 0; j < grid.res[1]; ++j) {
    pin[grid.node_index(0, j)] = 1;
    pin[grid.node_index(grid.res[0] - 1, j)] = 1;
  }
  return pin;
}

namespace {

using detail::Workspace;

// ---- bulk gradient norms -------------------------------------------------

// |grad phi|_eta per cell into out; gx, gy left in wsa, wsb.
void lifting_cell_norm(const GridSpec& g, const EnergyParams& p,
                       const double* phi, double* gx, double* gy,
                       double* out) {
  detail::cell_grads(g, phi, gx, gy);
  simd::active().smooth_norm(gx, g.dim == 2 ? gy : nullptr, p.eta, out,
                             g.cells());
}

struct DirectNormScratch {
  const double* gcx;
  const double* gcy;
  const double* gsx;
  const double* gsy;
};

// |grad (cos,sin) theta|_eta per cell; component gradients stay in the
// workspace for the gradient pass.
void direct_cell_norm(const GridSpec& g, const EnergyParams& p,
                      const double* theta, Workspace& ws, double* out,
                      DirectNormScratch* scratch) {
  const std::size_t nn = g.nodes(), nc = g.cells();
  for (std::size_t n = 0; n < nn; ++n) {
    ws.n0[n] = std::cos(theta[n]);
    ws.n1[n] = std::sin(theta[n]);
  }
  const auto& k = simd::active();
  if (g.dim == 2) {
    detail::cell_grads(g, ws.n0.data(), ws.c4.data(), ws.c5.data());
    detail::cell_grads(g, ws.n1.data(), ws.c6.data(), ws.c7.data());
    k.smooth_norm(ws.c4.data(), ws.c5.data(), 0.0, ws.c0.data(), nc);
    k.smooth_norm(ws.c6.data(), ws.c7.data(), 0.0, ws.c1.data(), nc);
    k.smooth_norm(ws.c0.data(), ws.c1.data(), p.eta, out, nc);
  } else {
    detail::cell_grads(g, ws.n0.data(), ws.c4.data(), nullptr);
    detail::cell_grads(g, ws.n1.data(), ws.c6.data(), nullptr);
    k.smooth_norm(ws.c4.data(), ws.c6.data(), p.eta, out, nc);
  }
  if (scratch)
    *scratch = {ws.c4.data(), ws.c5.data(), ws.c6.data(), ws.c7.data()};
}

// ---- v objective ---------------------------------------------------------

// E_v(v) = sum_c area [ psi(vbar) F_c + eps |grad v|^2 + W(vbar)/eps ]
double v_energy(const GridSpec& g, const EnergyParams& p,
                const double* bulk_weight, const double* v, Workspace& ws) {
  const auto& k = simd::active();
  const std::size_t nc = g.cells();
  const double area = g.cell_measure();
  detail::cell_means(g, v, ws.c0.data());
  detail::cell_grads(g, v, ws.c1.data(), ws.c2.data());
  detail::map_psi(p.psi, ws.c0.data(), ws.c3.data(), nc);
  double e = k.dot(ws.c3.data(), bulk_weight, nc);
  double gsq = k.nrm2sq(ws.c1.data(), nc);
  if (g.dim == 2) gsq += k.nrm2sq(ws.c2.data(), nc);
  e += p.epsilon * gsq;
  detail::map_w(p.W, ws.c0.data(), ws.c3.data(), nc);
  e += k.sum(ws.c3.data(), nc) / p.epsilon;
  return area * e;
}

void v_gradient(const GridSpec& g, const EnergyParams& p,
                const double* bulk_weight, const double* v, double* grad,
                Workspace& ws) {
  const auto& k = simd::active();
  const std::size_t nc = g.cells(), nn = g.nodes();
  const double area = g.cell_measure();
  std::fill(grad, grad + nn, 0.0);
  detail::cell_means(g, v, ws.c0.data());
  detail::cell_grads(g, v, ws.c1.data(), ws.c2.data());
  // mean-coupled part: area (psi'(vbar) F + W'(vbar)/eps)
  detail::map_psi_prime(p.psi, ws.c0.data(), ws.c3.data(), nc);
  k.mul(ws.c3.data(), bulk_weight, ws.c3.data(), nc);
  detail::map_w_prime(p.W, ws.c0.data(), ws.c4.data(), nc);
  k.axpy(1.0 / p.epsilon, ws.c4.data(), ws.c3.data(), nc);
  for (std::size_t c = 0; c < nc; ++c) ws.c3[c] *= area;
  detail::scatter_means(g, ws.c3.data(), grad);
  // gradient-coupled part: 2 eps area grad v
  for (std::size_t c = 0; c < nc; ++c) ws.c1[c] *= 2.0 * p.epsilon * area;
  if (g.dim == 2)
    for (std::size_t c = 0; c < nc; ++c) ws.c2[c] *= 2.0 * p.epsilon * area;
  detail::scatter_grads(g, ws.c1.data(), ws.c2.data(), grad);
}

// CG on the quadratic stationarity system for (psi, W) = (t^2, (1-s)^2).
void v_solve_quadratic(const GridSpec& g, const EnergyParams& p,
                       const double* bulk_weight, std::vector<double>& v,
                       Workspace& ws) {
  const auto& k = simd::active();
  const std::size_t nc = g.cells(), nn = g.nodes();
  const double area = g.cell_measure();
  const double inv_eps = 1.0 / p.epsilon;

  std::vector<double> q(nc);
  for (std::size_t c = 0; c < nc; ++c) q[c] = bulk_weight[c] + inv_eps;

  const auto apply = [&](const double* x, double* out) {
    std::fill(out, out + nn, 0.0);
    detail::cell_means(g, x, ws.c0.data());
    for (std::size_t c = 0; c < nc; ++c)
      ws.c0[c] = 2.0 * area * q[c] * ws.c0[c];
    detail::scatter_means(g, ws.c0.data(), out);
    detail::cell_grads(g, x, ws.c1.data(), ws.c2.data());
    for (std::size_t c = 0; c < nc; ++c) ws.c1[c] *= 2.0 * p.epsilon * area;
    if (g.dim == 2)
      for (std::size_t c = 0; c < nc; ++c) ws.c2[c] *= 2.0 * p.epsilon * area;
    detail::scatter_grads(g, ws.c1.data(), ws.c2.data(), out);
  };

  // right-hand side: scatter of 2 area / eps per cell
  std::vector<double> b(nn, 0.0);
  std::fill(ws.c0.begin(), ws.c0.begin() + nc, 2.0 * area * inv_eps);
  detail::scatter_means(g, ws.c0.data(), b.data());

  // Jacobi diagonal
  std::vector<double> diag(nn, 0.0);
  {
    const double mw = g.dim == 2 ? 0.25 : 0.5;
    const double gx2 = g.dim == 2 ? 0.25 / (g.h(0) * g.h(0)) : 1.0 / (g.h(0) * g.h(0));
    const double gy2 = g.dim == 2 ? 0.25 / (g.h(1) * g.h(1)) : 0.0;
    const std::size_t cx = g.cells_x();
    const std::size_t cyn = g.dim == 2 ? g.cells_y() : 1;
    for (std::size_t j = 0; j < cyn; ++j)
      for (std::size_t i = 0; i < cx; ++i) {
        const double d =
            2.0 * area * (q[j * cx + i] * mw * mw + p.epsilon * (gx2 + gy2));
        const std::size_t jj = g.dim == 2 ? j : 0;
        const std::size_t corners[4] = {
            g.node_index(i, jj), g.node_index(i + 1, jj),
            g.node_index(i, g.dim == 2 ? jj + 1 : jj),
            g.node_index(i + 1, g.dim == 2 ? jj + 1 : jj)};
        const int ncor = g.dim == 2 ? 4 : 2;
        for (int t = 0; t < ncor; ++t) diag[corners[t]] += d;
      }
  }

  std::vector<double> r(nn), z(nn), pdir(nn), ap(nn);
  apply(v.data(), ap.data());
  for (std::size_t n = 0; n < nn; ++n) r[n] = b[n] - ap[n];
  const double btol = 1e-10 * std::max(1.0, std::sqrt(k.nrm2sq(b.data(), nn)));
  for (std::size_t n = 0; n < nn; ++n) z[n] = r[n] / diag[n];
  pdir = z;
  double rz = k.dot(r.data(), z.data(), nn);
  std::size_t it = 0;
  const std::size_t max_it = 10000;
  while (std::sqrt(k.nrm2sq(r.data(), nn)) > btol) {
    if (++it > max_it)
      throw SolverError("phase-field solve: no convergence after 10^4 "
                        "iterations, residual " +
                        std::to_string(std::sqrt(k.nrm2sq(r.data(), nn))));
    apply(pdir.data(), ap.data());
    const double alpha = rz / k.dot(pdir.data(), ap.data(), nn);
    k.axpy(alpha, pdir.data(), v.data(), nn);
    k.axpy(-alpha, ap.data(), r.data(), nn);
    for (std::size_t n = 0; n < nn; ++n) z[n] = r[n] / diag[n];
    const double rz_new = k.dot(r.data(), z.data(), nn);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t n = 0; n < nn; ++n) pdir[n] = z[n] + beta * pdir[n];
  }
}

// Projected descent on the v objective (generic psi/W path and safeguard).
void v_descend(const GridSpec& g, const EnergyParams& p,
               const double* bulk_weight, std::vector<double>& v,
               Workspace& ws, double tol_step, std::size_t max_iters,
               const std::vector<std::uint8_t>* pinned = nullptr,
               const std::vector<double>* pin_values = nullptr) {
  const auto& k = simd::active();
  const std::size_t nn = g.nodes();
  std::vector<double> grad(nn), vtrial(nn), gprev(nn), sdiff(nn);
  double e = v_energy(g, p, bulk_weight, v.data(), ws);
  double alpha = 0.0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    v_gradient(g, p, bulk_weight, v.data(), grad.data(), ws);
    if (pinned)
      for (std::size_t n = 0; n < nn; ++n)
        if ((*pinned)[n]) grad[n] = 0.0;
    const double gsup = [&] {
      double m = 0.0;
      for (std::size_t n = 0; n < nn; ++n) m = std::max(m, std::fabs(grad[n]));
      return m;
    }();
    if (gsup == 0.0) break;
    if (it == 0) alpha = 0.1 / gsup;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      vtrial = v;
      k.axpy(-alpha, grad.data(), vtrial.data(), nn);
      k.clamp01(vtrial.data(), nn);
      if (pinned)
        for (std::size_t n = 0; n < nn; ++n)
          if ((*pinned)[n]) vtrial[n] = (*pin_values)[n];
      const double et = v_energy(g, p, bulk_weight, vtrial.data(), ws);
      if (et < e) {
        const double step_sup = k.sup_abs_diff(vtrial.data(), v.data(), nn);
        // Barzilai-Borwein step for the next iteration
        for (std::size_t n = 0; n < nn; ++n) sdiff[n] = vtrial[n] - v[n];
        v.swap(vtrial);
        e = et;
        gprev = grad;
        v_gradient(g, p, bulk_weight, v.data(), grad.data(), ws);
        if (pinned)
          for (std::size_t n = 0; n < nn; ++n)
            if ((*pinned)[n]) grad[n] = 0.0;
        double ss = 0.0, sy = 0.0;
        for (std::size_t n = 0; n < nn; ++n) {
          ss += sdiff[n] * sdiff[n];
          sy += sdiff[n] * (grad[n] - gprev[n]);
        }
        if (sy > 0.0) alpha = std::clamp(ss / sy, 1e-14, 1e8);
        accepted = true;
        if (step_sup <= tol_step) it = max_iters;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break; // at a projected stationary point
  }
}

std::vector<double> v_step_core(const GridSpec& g, const EnergyParams& p,
                                const std::vector<double>& bulk_weight,
                                const std::vector<double>& v_init,
                                Workspace& ws) {
  const auto& k = simd::active();
  const std::size_t nn = g.nodes();
  std::vector<double> v = v_init;
  const double e_init = v_energy(g, p, bulk_weight.data(), v.data(), ws);
  if (p.psi.tag == "quadratic" && p.W.tag == "quadratic_well") {
    v_solve_quadratic(g, p, bulk_weight.data(), v, ws);
    k.clamp01(v.data(), nn);
    if (v_energy(g, p, bulk_weight.data(), v.data(), ws) <= e_init) return v;
    v = v_init; // clamping undid the solve; polish by descent instead
  }
  v_descend(g, p, bulk_weight.data(), v, ws, 1e-10, 5000);
  if (v_energy(g, p, bulk_weight.data(), v.data(), ws) > e_init) return v_init;
  return v;
}

// ---- u objective ----------------------------------------------------------

struct BulkObjective {
  // Returns the bulk energy and, when grad != nullptr, the nodal gradient.
  std::function<double(const double*, double*)> eval;
};

BulkObjective make_lifting_objective(const GridSpec& g, const EnergyParams& p,
                                     std::vector<double> psi_v,
                                     Workspace& ws) {
  return {[&g, &p, psi_v = std::move(psi_v), &ws](const double* phi,
                                                  double* grad) {
    const auto& k = simd::active();
    const std::size_t nc = g.cells(), nn = g.nodes();
    const double area = g.cell_measure();
    detail::cell_grads(g, phi, ws.c0.data(), ws.c1.data());
    k.smooth_norm(ws.c0.data(), g.dim == 2 ? ws.c1.data() : nullptr, p.eta,
                  ws.c2.data(), nc);
    detail::map_f(p.f, ws.c2.data(), ws.c3.data(), nc);
    const double e = area * k.dot(psi_v.data(), ws.c3.data(), nc);
    if (grad) {
      std::fill(grad, grad + nn, 0.0);
      detail::map_f_prime(p.f, ws.c2.data(), ws.c3.data(), nc);
      for (std::size_t c = 0; c < nc; ++c) {
        const double q =
            area * psi_v[c] * ws.c3[c] / (ws.c2[c] + p.eta);
        ws.c0[c] *= q;
        ws.c1[c] *= q;
      }
      detail::scatter_grads(g, ws.c0.data(), ws.c1.data(), grad);
    }
    return e;
  }};
}

BulkObjective make_direct_objective(const GridSpec& g, const EnergyParams& p,
                                    std::vector<double> psi_v,
                                    Workspace& ws) {
  return {[&g, &p, psi_v = std::move(psi_v), &ws](const double* theta,
                                                  double* grad) {
    const auto& k = simd::active();
    const std::size_t nc = g.cells(), nn = g.nodes();
    const double area = g.cell_measure();
    DirectNormScratch sc{};
    direct_cell_norm(g, p, theta, ws, ws.c2.data(), &sc);
    detail::map_f(p.f, ws.c2.data(), ws.c3.data(), nc);
    const double e = area * k.dot(psi_v.data(), ws.c3.data(), nc);
    if (grad) {
      detail::map_f_prime(p.f, ws.c2.data(), ws.c3.data(), nc);
      // d|grad u|_eta / d(component gradients) = component / (t + eta)
      std::vector<double>& gc = ws.n2;
      std::vector<double>& gs = ws.n3;
      std::fill(gc.begin(), gc.begin() + nn, 0.0);
      std::fill(gs.begin(), gs.begin() + nn, 0.0);
      double* qx = ws.c0.data();
      double* qy = ws.c1.data();
      for (std::size_t c = 0; c < nc; ++c)
        ws.c3[c] = area * psi_v[c] * ws.c3[c] / (ws.c2[c] + p.eta);
      for (std::size_t c = 0; c < nc; ++c) {
        qx[c] = ws.c3[c] * sc.gcx[c];
        if (g.dim == 2) qy[c] = ws.c3[c] * sc.gcy[c];
      }
      detail::scatter_grads(g, qx, qy, gc.data());
      for (std::size_t c = 0; c < nc; ++c) {
        qx[c] = ws.c3[c] * sc.gsx[c];
        if (g.dim == 2) qy[c] = ws.c3[c] * sc.gsy[c];
      }
      detail::scatter_grads(g, qx, qy, gs.data());
      // chain rule through (cos, sin)
      for (std::size_t n = 0; n < nn; ++n)
        grad[n] = -gc[n] * std::sin(theta[n]) + gs[n] * std::cos(theta[n]);
    }
    return e;
  }};
}

std::vector<double> psi_of_vbar(const GridSpec& g, const EnergyParams& p,
                                const std::vector<double>& v, Workspace& ws) {
  std::vector<double> out(g.cells());
  detail::cell_means(g, v.data(), ws.c0.data());
  detail::map_psi(p.psi, ws.c0.data(), out.data(), g.cells());
  return out;
}

// Monotone descent with backtracking line search and Barzilai-Borwein step
// initialization. step_cap bounds the sup-norm of one update (direct mode
// winding preservation); 0 disables the cap.
void descend(const BulkObjective& obj, std::vector<double>& x,
             const std::vector<std::uint8_t>& pinned, double tol_step,
             std::size_t max_iters, double step_cap) {
  const std::size_t nn = x.size();
  std::vector<double> grad(nn), gnew(nn), xtrial(nn);
  double e = obj.eval(x.data(), grad.data());
  if (!pinned.empty())
    for (std::size_t n = 0; n < nn; ++n)
      if (pinned[n]) grad[n] = 0.0;
  double alpha = 0.0;
  bool ever_decreased = false;
  for (std::size_t it = 0; it < max_iters; ++it) {
    double gsup = 0.0, gsq = 0.0;
    for (std::size_t n = 0; n < nn; ++n) {
      gsup = std::max(gsup, std::fabs(grad[n]));
      gsq += grad[n] * grad[n];
    }
    if (gsup == 0.0) return;
    if (it == 0) alpha = 0.1 / gsup;
    if (step_cap > 0.0) alpha = std::min(alpha, step_cap / gsup);
    if (alpha * gsup < tol_step) return;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      xtrial = x;
      simd::active().axpy(-alpha, grad.data(), xtrial.data(), nn);
      const double et = obj.eval(xtrial.data(), nullptr);
      if (et <= e - 1e-4 * alpha * gsq) {
        x.swap(xtrial);
        const double eprev = e;
        e = et;
        obj.eval(x.data(), gnew.data());
        if (!pinned.empty())
          for (std::size_t n = 0; n < nn; ++n)
            if (pinned[n]) gnew[n] = 0.0;
        double ss = 0.0, sy = 0.0;
        for (std::size_t n = 0; n < nn; ++n) {
          const double s = -alpha * grad[n];
          ss += s * s;
          sy += s * (gnew[n] - grad[n]);
        }
        grad.swap(gnew);
        if (sy > 0.0) alpha = std::clamp(ss / sy, 1e-14, 1e8);
        accepted = true;
        ever_decreased = true;
        if (std::fabs(eprev - e) <= 1e-15 * std::max(1.0, std::fabs(e)))
          return;
        break;
      }
      alpha *= 0.5;
      if (alpha * gsup < tol_step) return;
    }
    if (!accepted) {
      if (ever_decreased) return;
      throw StepError("u-step line search found no decreasing step");
    }
  }
}

} // namespace

ScalarField v_step(const AngleField& phi, const ScalarField& v_init,
                   const EnergyParams& params, const GridSpec& grid) {
  if (!grid.same_shape(phi.grid) || !grid.same_shape(v_init.grid))
    throw DimensionError("v_step: field shapes differ");
  Workspace ws;
  ws.ensure(grid);
  std::vector<double> norm(grid.cells()), weight(grid.cells());
  lifting_cell_norm(grid, params, phi.values.data(), ws.c0.data(),
                    ws.c1.data(), norm.data());
  detail::map_f(params.f, norm.data(), weight.data(), grid.cells());
  return {grid, v_step_core(grid, params, weight, v_init.values, ws)};
}

ScalarField v_step(const CircleField& u, const ScalarField& v_init,
                   const EnergyParams& params, const GridSpec& grid) {
  if (!grid.same_shape(u.grid) || !grid.same_shape(v_init.grid))
    throw DimensionError("v_step: field shapes differ");
  Workspace ws;
  ws.ensure(grid);
  std::vector<double> norm(grid.cells()), weight(grid.cells());
  direct_cell_norm(grid, params, u.theta.data(), ws, norm.data(), nullptr);
  detail::map_f(params.f, norm.data(), weight.data(), grid.cells());
  return {grid, v_step_core(grid, params, weight, v_init.values, ws)};
}

AngleField u_step_lifting(const AngleField& phi, const ScalarField& v,
                          const EnergyParams& params, const GridSpec& grid,
                          const MinimizeOptions& opts) {
  if (!grid.same_shape(phi.grid) || !grid.same_shape(v.grid))
    throw DimensionError("u_step: field shapes differ");
  Workspace ws;
  ws.ensure(grid);
  AngleField out = phi;
  const BulkObjective obj =
      make_lifting_objective(grid, params, psi_of_vbar(grid, params, v.values, ws), ws);
  descend(obj, out.values, opts.pinned, opts.tol_step, opts.max_u_iters, 0.0);
  return out;
}

CircleField u_step_direct(const CircleField& u, const ScalarField& v,
                          const EnergyParams& params, const GridSpec& grid,
                          const MinimizeOptions& opts) {
  if (!grid.same_shape(u.grid) || !grid.same_shape(v.grid))
    throw DimensionError("u_step: field shapes differ");
  Workspace ws;
  ws.ensure(grid);
  CircleField out = u;
  const BulkObjective obj =
      make_direct_objective(grid, params, psi_of_vbar(grid, params, v.values, ws), ws);
  const double hmin = grid.dim == 2 ? std::min(grid.h(0), grid.h(1)) : grid.h(0);
  descend(obj, out.theta, opts.pinned, opts.tol_step, opts.max_u_iters,
          opts.direct_step_cap * hmin);
  for (double& t : out.theta) t = wrap_2pi(t);
  return out;
}

namespace {

template <typename Field, typename VStep, typename UStep, typename Eval>
MinimizeResult alternate_core(Field field, MinimizeMode mode,
                              const EnergyParams& params,
                              const Schedule& schedule,
                              const MinimizeOptions& opts, VStep do_v,
                              UStep do_u, Eval eval) {
  schedule.validate();
  params.validate();
  MinimizeResult res;
  res.mode = mode;
  ScalarField v = ScalarField::constant(field.grid, 1.0);
  for (const double eps : schedule.epsilons) {
    const EnergyParams p = params.with_epsilon(eps);
    double e_prev = std::numeric_limits<double>::infinity();
    for (std::size_t outer = 1; outer <= schedule.max_outer_iters; ++outer) {
      v = do_v(field, v, p);
      field = do_u(field, v, p, opts);
      const EnergyBreakdown eb = eval(field, v, p);
      res.trace.push_back({eps, outer, eb.bulk, eb.phase_field, eb.total});
      if (std::fabs(e_prev - eb.total) <=
          schedule.tol_energy * std::max(1.0, std::fabs(eb.total)))
        break;
      e_prev = eb.total;
    }
  }
  const EnergyBreakdown fin =
      eval(field, v, params.with_epsilon(schedule.epsilons.back()));
  res.energy = fin;
  res.v = std::move(v);
  if constexpr (std::is_same_v<Field, AngleField>)
    res.phi = std::move(field);
  else
    res.u = std::move(field);
  return res;
}

} // namespace

MinimizeResult alternate_minimize(const AngleField& init,
                                  const EnergyParams& params,
                                  const Schedule& schedule,
                                  const MinimizeOptions& opts) {
  return alternate_core(
      init, MinimizeMode::lifting, params, schedule, opts,
      [&](const AngleField& f, const ScalarField& v, const EnergyParams& p) {
        return v_step(f, v, p, f.grid);
      },
      [&](const AngleField& f, const ScalarField& v, const EnergyParams& p,
          const MinimizeOptions& o) { return u_step_lifting(f, v, p, f.grid, o); },
      [&](const AngleField& f, const ScalarField& v, const EnergyParams& p) {
        return eval_F_eps_lifting(f, v, p, f.grid);
      });
}

MinimizeResult alternate_minimize(const CircleField& init,
                                  const EnergyParams& params,
                                  const Schedule& schedule,
                                  const MinimizeOptions& opts) {
  return alternate_core(
      init, MinimizeMode::direct, params, schedule, opts,
      [&](const CircleField& f, const ScalarField& v, const EnergyParams& p) {
        return v_step(f, v, p, f.grid);
      },
      [&](const CircleField& f, const ScalarField& v, const EnergyParams& p,
          const MinimizeOptions& o) { return u_step_direct(f, v, p, f.grid, o); },
      [&](const CircleField& f, const ScalarField& v, const EnergyParams& p) {
        return eval_F_eps_direct(f, v, p, f.grid);
      });
}

MmProfileResult mm_profile_1d(double t_anchor, double epsilon,
                              const EnergyParams& params, double half_width,
                              std::size_t nodes) {
  if (!(t_anchor >= 0.0 && t_anchor <= 1.0))
    throw DomainError("profile anchor outside [0,1]");
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be > 0");
  if (nodes % 2 == 0) ++nodes; // midpoint must be a node
  const GridSpec grid = GridSpec::line(2.0 * half_width, nodes);
  const std::size_t mid = (nodes - 1) / 2;

  std::vector<std::uint8_t> pinned(nodes, 0);
  pinned.front() = pinned.back() = 1;
  pinned[mid] = 1;
  std::vector<double> pin_values(nodes, 0.0);
  pin_values.front() = pin_values.back() = 1.0;
  pin_values[mid] = t_anchor;

  std::vector<double> v(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    const double d = std::fabs(grid.node_x(i) - half_width);
    v[i] = 1.0 - (1.0 - t_anchor) * std::exp(-d / epsilon);
  }
  v.front() = v.back() = 1.0;
  v[mid] = t_anchor;

  Workspace ws;
  ws.ensure(grid);
  EnergyParams p = params.with_epsilon(epsilon);
  const std::vector<double> zero_weight(grid.cells(), 0.0);
  v_descend(grid, p, zero_weight.data(), v, ws, 1e-12, 20000, &pinned,
            &pin_values);
  const double cost = v_energy(grid, p, zero_weight.data(), v.data(), ws);
  return {{grid, std::move(v)}, cost};
}

// ---- recovery ------------------------------------------------------------

double JumpSegment::length(int dim) const {
  if (dim == 1) return 1.0;
  return std::hypot(x1 - x0, y1 - y0);
}

namespace {

struct CurveGeometry {
  double signed_dist = 0.0; // valid when 0 <= t <= 1
  double t = 0.0;           // projection parameter
  double dist = 0.0;        // distance to the segment (with endpoints)
};

CurveGeometry curve_geometry(const JumpSegment& s, int dim, double x,
                             double y) {
  if (dim == 1) {
    const double d = x - s.x0;
    return {d, 0.5, std::fabs(d)};
  }
  const double dx = s.x1 - s.x0, dy = s.y1 - s.y0;
  const double len2 = dx * dx + dy * dy;
  const double t = len2 > 0.0
                       ? ((x - s.x0) * dx + (y - s.y0) * dy) / len2
                       : 0.0;
  const double cross = dx * (y - s.y0) - dy * (x - s.x0);
  const double sd = cross / std::sqrt(std::max(len2, 1e-300));
  const double tc = std::clamp(t, 0.0, 1.0);
  const double px = s.x0 + tc * dx, py = s.y0 + tc * dy;
  return {sd, t, std::hypot(x - px, y - py)};
}

double min_curve_separation(const std::vector<JumpSegment>& curves, int dim) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < curves.size(); ++a)
    for (std::size_t b = a + 1; b < curves.size(); ++b) {
      // endpoint-sampled separation is enough for straight segments used here
      const JumpSegment &p = curves[a], &q = curves[b];
      for (const auto& [x, y] : {std::pair{p.x0, p.y0}, {p.x1, p.y1}}) {
        const auto gq = curve_geometry(q, dim, x, y);
        m = std::min(m, gq.dist);
      }
      for (const auto& [x, y] : {std::pair{q.x0, q.y0}, {q.x1, q.y1}}) {
        const auto gp = curve_geometry(p, dim, x, y);
        m = std::min(m, gp.dist);
      }
    }
  return m;
}

double curve_amplitude(const SharpLiftingTarget& target,
                       const JumpSegment& s) {
  const int dim = target.grid.dim;
  const double delta = 1e-6;
  double mx, my, nx, ny;
  if (dim == 1) {
    mx = s.x0;
    my = 0.0;
    nx = 1.0;
    ny = 0.0;
  } else {
    mx = 0.5 * (s.x0 + s.x1);
    my = 0.5 * (s.y0 + s.y1);
    const double dx = s.x1 - s.x0, dy = s.y1 - s.y0;
    const double len = std::hypot(dx, dy);
    nx = -dy / len;
    ny = dx / len;
  }
  return target.branch(mx + delta * nx, my + delta * ny) -
         target.branch(mx - delta * nx, my - delta * ny);
}

bool link_crosses_curve(const JumpSegment& s, int dim, double ax, double ay,
                        double bx, double by) {
  if (dim == 1) return (ax - s.x0) * (bx - s.x0) < 0.0;
  const auto ga = curve_geometry(s, dim, ax, ay);
  const auto gb = curve_geometry(s, dim, bx, by);
  if (ga.signed_dist * gb.signed_dist >= 0.0) return false;
  // crossing point parameter along the curve
  const double w = ga.signed_dist / (ga.signed_dist - gb.signed_dist);
  const double tc = ga.t + w * (gb.t - ga.t);
  return tc >= 0.0 && tc <= 1.0;
}

} // namespace

SharpLiftingTarget dipole_lifting_target(const GridSpec& grid,
                                         const VortexConfig& config) {
  config.validate(grid);
  if (config.total_charge() != 0)
    throw ConfigError("unbalanced vortex charges");
  SharpLiftingTarget target;
  target.grid = grid;
  target.branch = [config](double x, double y) {
    double phi = 0.0;
    for (const Vortex& v : config.vortices)
      phi += v.charge * std::atan2(y - v.y, x - v.x);
    return phi;
  };
  // pair each +1 with the nearest unmatched -1; the branch cut of the
  // atan2 sum is the connecting segment only for horizontally aligned
  // pairs, which is the family this constructor supports
  std::vector<const Vortex*> plus, minus;
  for (const Vortex& v : config.vortices)
    (v.charge > 0 ? plus : minus).push_back(&v);
  std::vector<bool> used(minus.size(), false);
  for (const Vortex* p : plus) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0;
    for (std::size_t i = 0; i < minus.size(); ++i) {
      if (used[i]) continue;
      const double d = std::hypot(p->x - minus[i]->x, p->y - minus[i]->y);
      if (d < best) {
        best = d;
        bi = i;
      }
    }
    used[bi] = true;
    if (std::fabs(p->y - minus[bi]->y) > 1e-9)
      throw ConfigError(
          "dipole lifting target requires horizontally aligned pairs");
    target.curves.push_back({p->x, p->y, minus[bi]->x, minus[bi]->y});
  }
  return target;
}

SharpLiftingTarget step_lifting_target(const GridSpec& grid, double delta) {
  grid.validate();
  if (!(delta > 0.0 && delta <= kPi))
    throw DomainError("step delta must lie in (0, pi]");
  SharpLiftingTarget target;
  target.grid = grid;
  const double mid = 0.5 * grid.extent[0];
  target.branch = [mid, delta](double x, double) {
    return x < mid ? 0.0 : delta;
  };
  if (grid.dim == 1)
    target.curves.push_back({mid, 0.0, mid, 0.0});
  else
    target.curves.push_back({mid, 0.0, mid, grid.extent[1]});
  return target;
}

RecoveryResult recovery_sequence(const SharpLiftingTarget& target,
                                 const EnergyParams& params,
                                 const Schedule& schedule,
                                 const JumpCost& g) {
  schedule.validate();
  const GridSpec& grid = target.grid;
  grid.validate();
  const int dim = grid.dim;
  const double hmin = dim == 2 ? std::min(grid.h(0), grid.h(1)) : grid.h(0);

  RecoveryResult res;

  // sharp target numbers: bulk from the cell sampling of the branch with
  // cut edges excluded, jump cost from the curve geometry
  std::vector<double> cell_phi(grid.cells());
  const std::size_t cx = grid.cells_x(), cyn = dim == 2 ? grid.cells_y() : 1;
  for (std::size_t j = 0; j < cyn; ++j)
    for (std::size_t i = 0; i < cx; ++i)
      cell_phi[j * cx + i] =
          target.branch(cell_center_x(grid, i), cell_center_y(grid, j));
  const auto edge_cut = [&](std::size_t i, std::size_t j, int axis) {
    const double ax = cell_center_x(grid, i), ay = cell_center_y(grid, j);
    const double bx = cell_center_x(grid, axis == 0 ? i + 1 : i);
    const double by = cell_center_y(grid, axis == 1 ? j + 1 : j);
    for (const JumpSegment& s : target.curves)
      if (link_crosses_curve(s, dim, ax, ay, bx, by)) return true;
    return false;
  };
  const double area = grid.cell_measure();
  for (std::size_t j = 0; j < cyn; ++j)
    for (std::size_t i = 0; i < cx; ++i) {
      double dx = 0.0, dy = 0.0;
      if (i + 1 < cx && !edge_cut(i, j, 0))
        dx = (cell_phi[j * cx + i + 1] - cell_phi[j * cx + i]) / grid.h(0);
      if (dim == 2 && j + 1 < cyn && !edge_cut(i, j, 1))
        dy = (cell_phi[(j + 1) * cx + i] - cell_phi[j * cx + i]) / grid.h(1);
      res.target_bulk += area * params.f.value(std::sqrt(dx * dx + dy * dy));
    }
  std::vector<double> amplitudes, t_stars;
  for (const JumpSegment& s : target.curves) {
    const double z = curve_amplitude(target, s);
    amplitudes.push_back(z);
    const GEval ge = g.eval_exact(std::fabs(z));
    t_stars.push_back(ge.argmin_t);
    res.target_jump_cost += ge.value * s.length(dim);
  }
  res.target_total = res.target_bulk + res.target_jump_cost;

  for (const double eps : schedule.epsilons) {
    const double layer = 6.0 * eps * std::fabs(std::log(eps));
    const double w = std::max(hmin, eps / 16.0);
    if (target.curves.size() > 1 &&
        min_curve_separation(target.curves, dim) < 2.0 * (layer + w))
      throw LayerCollisionError(
          "jump layers overlap at epsilon=" + std::to_string(eps) +
          "; use a smaller layer constant or finer schedule");

    AngleField phi{grid, std::vector<double>(grid.nodes())};
    ScalarField v{grid, std::vector<double>(grid.nodes(), 1.0)};
    const std::size_t ny = dim == 2 ? grid.res[1] : 1;
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t i = 0; i < grid.res[0]; ++i) {
        const double x = grid.node_x(i), y = grid.node_y(j);
        double p = target.branch(x, y);
        double vmin = 1.0;
        for (std::size_t c = 0; c < target.curves.size(); ++c) {
          const auto geo = curve_geometry(target.curves[c], dim, x, y);
          if (geo.dist <= layer + w) {
            const double prof =
                1.0 - (1.0 - t_stars[c]) *
                          std::exp(-std::max(0.0, geo.dist - w) / eps);
            vmin = std::min(vmin, prof);
          }
          if (geo.t >= 0.0 && geo.t <= 1.0) {
            const double s = geo.signed_dist;
            const double ramp = std::clamp((s + w) / (2.0 * w), 0.0, 1.0);
            const double heavi = s >= 0.0 ? 1.0 : 0.0;
            p += amplitudes[c] * (ramp - heavi);
          }
        }
        phi.values[grid.node_index(i, j)] = p;
        v.values[grid.node_index(i, j)] = vmin;
      }
    RecoveryItem item;
    item.epsilon = eps;
    item.energy =
        eval_F_eps_lifting(phi, v, params.with_epsilon(eps), grid);
    item.phi = std::move(phi);
    item.v = std::move(v);
    res.items.push_back(std::move(item));
  }
  return res;
}

// ---- diagnostics -----------------------------------------------------------

namespace {

template <typename EvalFn>
double fd_check_core(std::vector<double> x, EvalFn eval_with_grad,
                     std::size_t n_probes, std::uint64_t seed,
                     const std::vector<std::uint8_t>& pinned) {
  const std::size_t nn = x.size();
  std::vector<double> grad(nn);
  eval_with_grad(x.data(), grad.data());
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t k = 0; k < n_probes; ++k) {
    std::size_t n = rng() % nn;
    for (int guard = 0; !pinned.empty() && pinned[n] && guard < 1000; ++guard)
      n = rng() % nn;
    const double delta = 1e-6;
    const double keep = x[n];
    x[n] = keep + delta;
    const double ep = eval_with_grad(x.data(), nullptr);
    x[n] = keep - delta;
    const double em = eval_with_grad(x.data(), nullptr);
    x[n] = keep;
    const double fd = (ep - em) / (2.0 * delta);
    const double err = std::fabs(fd - grad[n]) /
                       std::max({1.0, std::fabs(fd), std::fabs(grad[n])});
    worst = std::max(worst, err);
  }
  return worst;
}

} // namespace

double gradient_fd_check(const AngleField& phi, const ScalarField& v,
                         const EnergyParams& params, const GridSpec& grid,
                         std::size_t n_probes, std::uint64_t seed,
                         const std::vector<std::uint8_t>& pinned) {
  Workspace ws;
  ws.ensure(grid);
  const BulkObjective obj = make_lifting_objective(
      grid, params, psi_of_vbar(grid, params, v.values, ws), ws);
  return fd_check_core(
      phi.values,
      [&](const double* x, double* g) { return obj.eval(x, g); }, n_probes,
      seed, pinned);
}

double gradient_fd_check(const CircleField& u, const ScalarField& v,
                         const EnergyParams& params, const GridSpec& grid,
                         std::size_t n_probes, std::uint64_t seed,
                         const std::vector<std::uint8_t>& pinned) {
  Workspace ws;
  ws.ensure(grid);
  const BulkObjective obj = make_direct_objective(
      grid, params, psi_of_vbar(grid, params, v.values, ws), ws);
  return fd_check_core(
      u.theta, [&](const double* x, double* g) { return obj.eval(x, g); },
      n_probes, seed, pinned);
}

ScalarField prolong(const ScalarField& f, const GridSpec& fine) {
  const GridSpec& c = f.grid;
  if (c.dim != fine.dim) throw DimensionError("prolong: dim mismatch");
  ScalarField out{fine, std::vector<double>(fine.nodes())};
  const auto sample = [&](double x, double y) {
    const double sx =
        std::clamp(x / c.extent[0], 0.0, 1.0) * (c.res[0] - 1);
    const std::size_t i0 = std::min(static_cast<std::size_t>(sx), c.res[0] - 2);
    const double wx = sx - static_cast<double>(i0);
    if (c.dim == 1)
      return f.values[i0] * (1.0 - wx) + f.values[i0 + 1] * wx;
    const double sy =
        std::clamp(y / c.extent[1], 0.0, 1.0) * (c.res[1] - 1);
    const std::size_t j0 = std::min(static_cast<std::size_t>(sy), c.res[1] - 2);
    const double wy = sy - static_cast<double>(j0);
    const double a = f.at(i0, j0) * (1.0 - wx) + f.at(i0 + 1, j0) * wx;
    const double b = f.at(i0, j0 + 1) * (1.0 - wx) + f.at(i0 + 1, j0 + 1) * wx;
    return a * (1.0 - wy) + b * wy;
  };
  const std::size_t ny = fine.dim == 2 ? fine.res[1] : 1;
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < fine.res[0]; ++i)
      out.values[fine.node_index(i, j)] =
          sample(fine.node_x(i), fine.node_y(j));
  return out;
}

CircleField prolong(const CircleField& u, const GridSpec& fine) {
  ScalarField cs{u.grid, std::vector<double>(u.grid.nodes())};
  ScalarField sn{u.grid, std::vector<double>(u.grid.nodes())};
  for (std::size_t n = 0; n < u.theta.size(); ++n) {
    cs.values[n] = std::cos(u.theta[n]);
    sn.values[n] = std::sin(u.theta[n]);
  }
  const ScalarField fc = prolong(cs, fine);
  const ScalarField fs = prolong(sn, fine);
  CircleField out{fine, std::vector<double>(fine.nodes())};
  for (std::size_t n = 0; n < out.theta.size(); ++n)
    out.theta[n] = wrap_2pi(std::atan2(fs.values[n], fc.values[n]));
  return out;
}

} // namespace atlift
