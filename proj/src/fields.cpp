#include "atlift/fields.hpp"

#include <cmath>

#include "atlift/errors.hpp"

namespace atlift {

double wrap_2pi(double x) {
  double y = std::fmod(x, kTwoPi);
  if (y < 0.0) y += kTwoPi;
  if (y >= kTwoPi) y = 0.0;
  return y;
}

double principal_angle(double x) {
  double y = std::fmod(x, kTwoPi);
  if (y > kPi) y -= kTwoPi;
  if (y <= -kPi) y += kTwoPi;
  return y;
}

void VortexConfig::validate(const GridSpec& grid) const {
  grid.validate();
  if (grid.dim != 2) throw DimensionError("vortex configs need a 2-D grid");
  for (std::size_t a = 0; a < vortices.size(); ++a) {
    const Vortex& v = vortices[a];
    if (v.charge != 1 && v.charge != -1)
      throw ConfigError("vortex charges must be +-1");
    if (!(v.x > 0.0 && v.x < grid.extent[0] && v.y > 0.0 &&
          v.y < grid.extent[1]))
      throw ConfigError("vortex positions must be strictly interior");
    for (std::size_t b = a + 1; b < vortices.size(); ++b) {
      const double dx = v.x - vortices[b].x;
      const double dy = v.y - vortices[b].y;
      if (dx * dx + dy * dy < 1e-24)
        throw ConfigError("vortex positions must be pairwise distinct");
    }
  }
}

CircleField make_step_map(const GridSpec& grid, double delta) {
  grid.validate();
  if (!(delta > 0.0 && delta <= kPi))
    throw DomainError("step delta must lie in (0, pi]");
  CircleField u{grid, std::vector<double>(grid.nodes(), 0.0)};
  const double mid = 0.5 * grid.extent[0];
  const std::size_t ny = grid.dim == 1 ? 1 : grid.res[1];
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < grid.res[0]; ++i)
      u.theta[grid.node_index(i, j)] =
          grid.node_x(i) < mid ? 0.0 : wrap_2pi(delta);
  return u;
}

namespace {

double vortex_angle_sum(const VortexConfig& config, double x, double y) {
  double phi = 0.0;
  for (const Vortex& v : config.vortices)
    phi += v.charge * std::atan2(y - v.y, x - v.x);
  return phi;
}

} // namespace

CircleField make_dipole_map(const GridSpec& grid, const VortexConfig& config) {
  config.validate(grid);
  if (config.total_charge() != 0)
    throw ConfigError(
        "unbalanced vortex charges: nonzero boundary degree is not "
        "supported on a box domain");
  CircleField u{grid, std::vector<double>(grid.nodes(), 0.0)};
  for (std::size_t j = 0; j < grid.res[1]; ++j)
    for (std::size_t i = 0; i < grid.res[0]; ++i) {
      const double px = grid.node_x(i), py = grid.node_y(j);
      for (const Vortex& v : config.vortices)
        if (px == v.x && py == v.y)
          throw ConfigError("vortex sits exactly on a grid node");
      u.theta[grid.node_index(i, j)] =
          wrap_2pi(vortex_angle_sum(config, px, py));
    }
  return u;
}

AngleField dipole_angle_unwrapped(const GridSpec& grid,
                                  const VortexConfig& config) {
  config.validate(grid);
  if (config.total_charge() != 0)
    throw ConfigError("unbalanced vortex charges");
  AngleField phi{grid, std::vector<double>(grid.nodes(), 0.0)};
  for (std::size_t j = 0; j < grid.res[1]; ++j)
    for (std::size_t i = 0; i < grid.res[0]; ++i)
      phi.values[grid.node_index(i, j)] =
          vortex_angle_sum(config, grid.node_x(i), grid.node_y(j));
  return phi;
}

Vortex snap_to_cell_center(const GridSpec& grid, const Vortex& v) {
  const double hx = grid.h(0), hy = grid.h(1);
  Vortex s = v;
  s.x = (std::floor(v.x / hx) + 0.5) * hx;
  s.y = (std::floor(v.y / hy) + 0.5) * hy;
  return s;
}

namespace {

double checked_edge_diff(double a, double b) {
  const double d = principal_angle(a - b);
  if (d == kPi || d == -kPi)
    throw DegeneratePlaquetteError(
        "edge difference exactly +-pi: winding undefined");
  return d;
}

} // namespace

int plaquette_winding(const CircleField& u, std::size_t i, std::size_t j) {
  const GridSpec& g = u.grid;
  if (g.dim != 2) throw DimensionError("plaquette winding needs a 2-D grid");
  if (i + 1 >= g.res[0] || j + 1 >= g.res[1])
    throw DimensionError("plaquette index out of range");
  const double t00 = u.at(i, j), t10 = u.at(i + 1, j);
  const double t11 = u.at(i + 1, j + 1), t01 = u.at(i, j + 1);
  const double s = checked_edge_diff(t10, t00) + checked_edge_diff(t11, t10) +
                   checked_edge_diff(t01, t11) + checked_edge_diff(t00, t01);
  return static_cast<int>(std::lround(s / kTwoPi));
}

std::vector<PlaquetteCharge> scan_windings(const CircleField& u) {
  std::vector<PlaquetteCharge> out;
  for (std::size_t j = 0; j + 1 < u.grid.res[1]; ++j)
    for (std::size_t i = 0; i + 1 < u.grid.res[0]; ++i) {
      const int w = plaquette_winding(u, i, j);
      if (w != 0) out.push_back({i, j, w});
    }
  return out;
}

int loop_winding(const CircleField& u, std::size_t i0, std::size_t i1,
                 std::size_t j0, std::size_t j1) {
  double s = 0.0;
  for (std::size_t i = i0; i < i1; ++i)
    s += checked_edge_diff(u.at(i + 1, j0), u.at(i, j0));
  for (std::size_t j = j0; j < j1; ++j)
    s += checked_edge_diff(u.at(i1, j + 1), u.at(i1, j));
  for (std::size_t i = i1; i > i0; --i)
    s += checked_edge_diff(u.at(i - 1, j1), u.at(i, j1));
  for (std::size_t j = j1; j > j0; --j)
    s += checked_edge_diff(u.at(i0, j - 1), u.at(i0, j));
  return static_cast<int>(std::lround(s / kTwoPi));
}

AngleField lift_field(const CircleField& u, const ShiftField& k) {
  if (!u.grid.same_shape(k.grid))
    throw DimensionError("lift_field: field shapes differ");
  AngleField phi{u.grid, std::vector<double>(u.grid.nodes())};
  for (std::size_t n = 0; n < u.theta.size(); ++n)
    phi.values[n] = u.theta[n] + kTwoPi * static_cast<double>(k.values[n]);
  return phi;
}

double sigma_jump_length(const CellField& phi, double sigma) {
  if (sigma < 0.0) throw DomainError("sigma must be >= 0");
  const GridSpec& g = phi.grid;
  double total = 0.0;
  if (g.dim == 1) {
    const double h = g.h(0);
    for (std::size_t i = 0; i + 1 < g.cells_x(); ++i) {
      const double d = std::fabs(phi.values[i + 1] - phi.values[i]);
      if (d > 0.0 && d >= sigma) total += h;
    }
    return total;
  }
  const double hx = g.h(0), hy = g.h(1);
  for (std::size_t j = 0; j < g.cells_y(); ++j)
    for (std::size_t i = 0; i < g.cells_x(); ++i) {
      if (i + 1 < g.cells_x()) {
        const double d = std::fabs(phi.cell(i + 1, j) - phi.cell(i, j));
        if (d > 0.0 && d >= sigma) total += hy;
      }
      if (j + 1 < g.cells_y()) {
        const double d = std::fabs(phi.cell(i, j + 1) - phi.cell(i, j));
        if (d > 0.0 && d >= sigma) total += hx;
      }
    }
  return total;
}

double cell_center_x(const GridSpec& grid, std::size_t i) {
  return (static_cast<double>(i) + 0.5) * grid.h(0);
}

double cell_center_y(const GridSpec& grid, std::size_t j) {
  return grid.dim == 1 ? 0.0 : (static_cast<double>(j) + 0.5) * grid.h(1);
}

CellField sample_cells(const GridSpec& grid, const CircleField& u) {
  if (!grid.same_shape(u.grid))
    throw DimensionError("sample_cells: grid mismatch");
  CellField out{grid, std::vector<double>(grid.cells(), 0.0)};
  // Cell value = angle of the averaged unit vectors of the corners; for
  // near-constant corners this is the obvious representative, and it never
  // leaves [0, 2pi).
  const std::size_t ny = grid.dim == 1 ? 1 : grid.cells_y();
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < grid.cells_x(); ++i) {
      double cs = 0.0, sn = 0.0;
      const std::size_t jj = grid.dim == 1 ? 0 : j + 1;
      for (const std::size_t n :
           {grid.node_index(i, j), grid.node_index(i + 1, j),
            grid.node_index(i, jj), grid.node_index(i + 1, jj)}) {
        cs += std::cos(u.theta[n]);
        sn += std::sin(u.theta[n]);
      }
      out.values[grid.dim == 1 ? i : grid.cell_index(i, j)] =
          wrap_2pi(std::atan2(sn, cs));
    }
  return out;
}

} // namespace atlift
