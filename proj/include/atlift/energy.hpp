#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "atlift/fields.hpp"
#include "atlift/functions.hpp"
#include "atlift/jump_cost.hpp"

namespace atlift {

// Additive decomposition of every energy this library evaluates. The
// cantor slot exists to complete the measure-theoretic decomposition but
// is identically zero for grid fields.
struct EnergyBreakdown {
  double bulk = 0.0;
  double phase_field = 0.0;
  double jump = 0.0;
  double transport = 0.0;
  double cantor = 0.0;
  double total = 0.0;

  void finalize() { total = bulk + phase_field + jump + transport + cantor; }
};

// Diffuse energy of (phi, v) on the grid: cellwise
//   psi(vbar) f(|grad phi|_eta) + eps |grad v|^2 + W(vbar)/eps
// with |t|_eta = sqrt(|t|^2 + eta^2) - eta, summed with cell measure.
// An optional 0/1 cell mask restricts the sum (used for localization and
// punctured-domain tests). Throws DimensionError on shape mismatch and
// DomainError if v leaves [0,1] by more than 1e-12.
EnergyBreakdown eval_F_eps_lifting(const AngleField& phi,
                                   const ScalarField& v,
                                   const EnergyParams& params,
                                   const GridSpec& grid,
                                   std::span<const double> cell_mask = {});

// Same integrand with the R^2-embedded gradient of u = (cos, sin) theta.
EnergyBreakdown eval_F_eps_direct(const CircleField& u, const ScalarField& v,
                                  const EnergyParams& params,
                                  const GridSpec& grid,
                                  std::span<const double> cell_mask = {});

enum class JumpMetric { chord, arc };
JumpMetric parse_jump_metric(const std::string& tag); // ConfigError

// An interior edge between cell (i,j) and its +x (axis 0) or +y (axis 1)
// neighbor.
struct EdgeKey {
  std::size_t i = 0, j = 0;
  int axis = 0;
};

// Piecewise-constant circle-valued map: base angle per cell plus a marked
// edge jump set.
struct SharpCircleField {
  CellField base;
  std::vector<EdgeKey> jump_edges;
};

// Sharp-interface energy: bulk f(|grad u|) over cells (gradients taken
// across unmarked edges only), plus either the jump sum
// g(d(u+, u-)) * edge length (d = chord or angular geodesic) or, when
// mg_value is supplied, that value as the transport component with the
// jump sum omitted.
EnergyBreakdown eval_sharp_energy(const SharpCircleField& u,
                                  const JumpCost& g, JumpMetric metric,
                                  const EnergyParams& params,
                                  std::optional<double> mg_value = {});

} // namespace atlift
