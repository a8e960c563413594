#pragma once

#include <cstdint>
#include <vector>

#include "atlift/grid.hpp"

namespace atlift {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.1415926535897932384626433832795;

// wrap to [0, 2*pi)
double wrap_2pi(double x);
// wrap to (-pi, pi]
double principal_angle(double x);

// Real-valued field on grid nodes.
struct ScalarField {
  GridSpec grid;
  std::vector<double> values;

  static ScalarField constant(const GridSpec& g, double c) {
    return {g, std::vector<double>(g.nodes(), c)};
  }
  double& at(std::size_t i, std::size_t j) {
    return values[grid.node_index(i, j)];
  }
  double at(std::size_t i, std::size_t j) const {
    return values[grid.node_index(i, j)];
  }
};

using AngleField = ScalarField; // lifting angle, unconstrained reals

// Map into S^1 stored as its base angle in [0, 2*pi) per node; the
// represented value is (cos theta, sin theta), unit modulus by
// construction.
struct CircleField {
  GridSpec grid;
  std::vector<double> theta;

  static CircleField constant(const GridSpec& g, double angle) {
    return {g, std::vector<double>(g.nodes(), wrap_2pi(angle))};
  }
  double at(std::size_t i, std::size_t j) const {
    return theta[grid.node_index(i, j)];
  }
};

// Integer shift per node; phi = theta + 2*pi*k is the encoded lifting.
struct ShiftField {
  GridSpec grid;
  std::vector<std::int64_t> values;

  static ShiftField constant(const GridSpec& g, std::int64_t c) {
    return {g, std::vector<std::int64_t>(g.nodes(), c)};
  }
};

// Real values attached to cells instead of nodes (piecewise-constant
// fields; used by the sharp-interface energies and the lifting solver).
struct CellField {
  GridSpec grid;
  std::vector<double> values;

  static CellField constant(const GridSpec& g, double c) {
    return {g, std::vector<double>(g.cells(), c)};
  }
  double& cell(std::size_t i, std::size_t j) {
    return values[grid.cell_index(i, j)];
  }
  double cell(std::size_t i, std::size_t j) const {
    return values[grid.cell_index(i, j)];
  }
};

struct Vortex {
  double x = 0.0;
  double y = 0.0;
  int charge = 1; // only +-1 supported
};

struct VortexConfig {
  std::vector<Vortex> vortices;

  int total_charge() const {
    int s = 0;
    for (const auto& v : vortices) s += v.charge;
    return s;
  }
  // Throws ConfigError on duplicate/out-of-domain positions or |q| != 1.
  void validate(const GridSpec& grid) const;
};

// Jump datum: theta = 0 on the left of the x-midline, delta on the right.
// delta must lie in (0, pi].
CircleField make_step_map(const GridSpec& grid, double delta);

// theta(x) = sum_i q_i * atan2(x - p_i) reduced mod 2*pi. Requires a 2-D
// grid and total charge 0 (a nonzero boundary degree is not representable
// on a box). Positions should avoid nodes; snap_to_cell_center helps.
CircleField make_dipole_map(const GridSpec& grid, const VortexConfig& config);

// The same sum without the mod-2*pi reduction: a node sampling of the
// branch of the angle whose discontinuity is the segment between the two
// vortices of each pair (for horizontally aligned pairs). Used as the
// W^{1,2}-style initial lifting.
AngleField dipole_angle_unwrapped(const GridSpec& grid,
                                  const VortexConfig& config);

Vortex snap_to_cell_center(const GridSpec& grid, const Vortex& v);

// Discrete degree of the plaquette with lower-left node (i,j):
// (1/2pi) * sum of principal edge differences around the four corners.
// Throws DegeneratePlaquetteError if an edge difference is exactly +-pi.
int plaquette_winding(const CircleField& u, std::size_t i, std::size_t j);

// All nonzero plaquette windings as (i, j, w) triples.
struct PlaquetteCharge {
  std::size_t i, j;
  int w;
};
std::vector<PlaquetteCharge> scan_windings(const CircleField& u);

// Winding of the counterclockwise boundary loop of the cell rectangle
// [i0, i1) x [j0, j1) (discrete Stokes partner of scan_windings).
int loop_winding(const CircleField& u, std::size_t i0, std::size_t i1,
                 std::size_t j0, std::size_t j1);

// phi = theta + 2*pi*k nodewise.
AngleField lift_field(const CircleField& u, const ShiftField& k);

// Total edge length where the piecewise-constant phi jumps by at least
// sigma (1-D: h per jump edge; 2-D: sum of face lengths). Zero-difference
// edges are plateaus, never jumps.
double sigma_jump_length(const CellField& phi, double sigma);

// Cell-center sample of a node field / analytic helpers for tests and the
// lifting solver.
CellField sample_cells(const GridSpec& grid, const CircleField& u);
double cell_center_x(const GridSpec& grid, std::size_t i);
double cell_center_y(const GridSpec& grid, std::size_t j);

} // namespace atlift
