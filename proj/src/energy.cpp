#include "atlift/energy.hpp"

#include <cmath>
#include <unordered_set>

#include "atlift/detail/cellops.hpp"
#include "atlift/errors.hpp"

namespace atlift {

namespace {

void check_pair_shapes(const GridSpec& grid, const GridSpec& a,
                       const GridSpec& b) {
  grid.validate();
  if (!grid.same_shape(a) || !grid.same_shape(b))
    throw DimensionError("field shapes do not match the grid");
}

void check_v_range(const std::vector<double>& v) {
  for (const double x : v)
    if (x < -1e-12 || x > 1.0 + 1e-12)
      throw DomainError("phase field v outside [0,1]");
}

double masked_sum(const double* a, std::span<const double> mask,
                  std::size_t n) {
  const auto& k = simd::active();
  if (mask.empty()) return k.sum(a, n);
  return k.dot(a, mask.data(), n);
}

double masked_nrm2sq(const double* a, std::span<const double> mask,
                     std::size_t n, double* scratch) {
  const auto& k = simd::active();
  if (mask.empty()) return k.nrm2sq(a, n);
  k.mul(a, a, scratch, n);
  return k.dot(scratch, mask.data(), n);
}

EnergyBreakdown diffuse_energy(const GridSpec& grid,
                               const EnergyParams& params,
                               const double* cell_norm, // |grad u|_eta
                               const ScalarField& v,
                               std::span<const double> cell_mask,
                               detail::Workspace& ws) {
  const auto& k = simd::active();
  const std::size_t nc = grid.cells();
  const double area = grid.cell_measure();

  detail::cell_means(grid, v.values.data(), ws.c4.data());
  detail::cell_grads(grid, v.values.data(), ws.c5.data(), ws.c6.data());

  detail::map_psi(params.psi, ws.c4.data(), ws.c7.data(), nc);
  detail::map_f(params.f, cell_norm, ws.c3.data(), nc);
  k.mul(ws.c7.data(), ws.c3.data(), ws.c3.data(), nc);
  const double bulk = area * masked_sum(ws.c3.data(), cell_mask, nc);

  detail::map_w(params.W, ws.c4.data(), ws.c7.data(), nc);
  double grad_sq = masked_nrm2sq(ws.c5.data(), cell_mask, nc, ws.c3.data());
  if (grid.dim == 2)
    grad_sq += masked_nrm2sq(ws.c6.data(), cell_mask, nc, ws.c3.data());
  const double well = masked_sum(ws.c7.data(), cell_mask, nc);
  const double phase =
      area * (params.epsilon * grad_sq + well / params.epsilon);

  EnergyBreakdown e;
  e.bulk = bulk;
  e.phase_field = phase;
  e.finalize();
  return e;
}

} // namespace

EnergyBreakdown eval_F_eps_lifting(const AngleField& phi,
                                   const ScalarField& v,
                                   const EnergyParams& params,
                                   const GridSpec& grid,
                                   std::span<const double> cell_mask) {
  check_pair_shapes(grid, phi.grid, v.grid);
  check_v_range(v.values);
  if (!cell_mask.empty() && cell_mask.size() != grid.cells())
    throw DimensionError("cell mask size mismatch");

  detail::Workspace ws;
  ws.ensure(grid);
  detail::cell_grads(grid, phi.values.data(), ws.c0.data(), ws.c1.data());
  simd::active().smooth_norm(ws.c0.data(),
                             grid.dim == 2 ? ws.c1.data() : nullptr,
                             params.eta, ws.c2.data(), grid.cells());
  return diffuse_energy(grid, params, ws.c2.data(), v, cell_mask, ws);
}

EnergyBreakdown eval_F_eps_direct(const CircleField& u, const ScalarField& v,
                                  const EnergyParams& params,
                                  const GridSpec& grid,
                                  std::span<const double> cell_mask) {
  check_pair_shapes(grid, u.grid, v.grid);
  check_v_range(v.values);
  if (!cell_mask.empty() && cell_mask.size() != grid.cells())
    throw DimensionError("cell mask size mismatch");

  detail::Workspace ws;
  ws.ensure(grid);
  const std::size_t nn = grid.nodes(), nc = grid.cells();
  for (std::size_t n = 0; n < nn; ++n) {
    ws.n0[n] = std::cos(u.theta[n]);
    ws.n1[n] = std::sin(u.theta[n]);
  }
  const auto& k = simd::active();
  if (grid.dim == 2) {
    detail::cell_grads(grid, ws.n0.data(), ws.c0.data(), ws.c1.data());
    detail::cell_grads(grid, ws.n1.data(), ws.c2.data(), ws.c3.data());
    k.smooth_norm(ws.c0.data(), ws.c1.data(), 0.0, ws.c0.data(), nc);
    k.smooth_norm(ws.c2.data(), ws.c3.data(), 0.0, ws.c1.data(), nc);
    k.smooth_norm(ws.c0.data(), ws.c1.data(), params.eta, ws.c2.data(), nc);
  } else {
    detail::cell_grads(grid, ws.n0.data(), ws.c0.data(), nullptr);
    detail::cell_grads(grid, ws.n1.data(), ws.c1.data(), nullptr);
    k.smooth_norm(ws.c0.data(), ws.c1.data(), params.eta, ws.c2.data(), nc);
  }
  return diffuse_energy(grid, params, ws.c2.data(), v, cell_mask, ws);
}

JumpMetric parse_jump_metric(const std::string& tag) {
  if (tag == "chord") return JumpMetric::chord;
  if (tag == "arc") return JumpMetric::arc;
  throw ConfigError("unknown jump metric: " + tag);
}

namespace {

std::uint64_t edge_code(const EdgeKey& e) {
  return (static_cast<std::uint64_t>(e.axis) << 62) |
         (static_cast<std::uint64_t>(e.j) << 31) |
         static_cast<std::uint64_t>(e.i);
}

} // namespace

EnergyBreakdown eval_sharp_energy(const SharpCircleField& u,
                                  const JumpCost& g, JumpMetric metric,
                                  const EnergyParams& params,
                                  std::optional<double> mg_value) {
  const GridSpec& grid = u.base.grid;
  grid.validate();
  if (u.base.values.size() != grid.cells())
    throw DimensionError("cell field size mismatch");

  std::unordered_set<std::uint64_t> marked;
  for (const EdgeKey& e : u.jump_edges) marked.insert(edge_code(e));
  const auto is_marked = [&](std::size_t i, std::size_t j, int axis) {
    return marked.count(edge_code({i, j, axis})) != 0;
  };

  const std::size_t cx = grid.cells_x();
  const std::size_t cy = grid.dim == 1 ? 1 : grid.cells_y();
  const double hx = grid.h(0);
  const double hy = grid.dim == 2 ? grid.h(1) : 0.0;
  const double area = grid.cell_measure();

  EnergyBreakdown e;
  for (std::size_t j = 0; j < cy; ++j)
    for (std::size_t i = 0; i < cx; ++i) {
      const double t0 = u.base.values[j * cx + i];
      double dx = 0.0, dy = 0.0;
      if (i + 1 < cx && !is_marked(i, j, 0))
        dx = principal_angle(u.base.values[j * cx + i + 1] - t0) / hx;
      if (grid.dim == 2 && j + 1 < cy && !is_marked(i, j, 1))
        dy = principal_angle(u.base.values[(j + 1) * cx + i] - t0) / hy;
      e.bulk += area * params.f.value(std::sqrt(dx * dx + dy * dy));
    }

  if (mg_value) {
    e.transport = *mg_value;
  } else {
    for (const EdgeKey& edge : u.jump_edges) {
      std::size_t a = edge.j * cx + edge.i;
      std::size_t b = edge.axis == 0 ? a + 1 : a + cx;
      if (edge.axis != 0 && edge.axis != 1)
        throw ConfigError("edge axis must be 0 or 1");
      if (b >= u.base.values.size())
        throw DimensionError("marked edge out of range");
      const double arc =
          std::fabs(principal_angle(u.base.values[b] - u.base.values[a]));
      const double d =
          metric == JumpMetric::arc ? arc : 2.0 * std::sin(0.5 * arc);
      const double len =
          grid.dim == 1 ? 1.0 : (edge.axis == 0 ? hy : hx);
      e.jump += g.eval(d) * len;
    }
  }
  e.finalize();
  return e;
}

} // namespace atlift
