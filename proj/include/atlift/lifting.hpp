#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "atlift/fields.hpp"
#include "atlift/jump_cost.hpp"

namespace atlift {

// Which edge difference the shift-field objective charges. The principal
// convention measures the lifted jump against the geodesic transition of
// the base angles (the generic objective). The raw convention measures
// the literal difference of the stored representatives theta + 2*pi*k;
// combined with a sigma threshold it isolates the integer wall structure
// of a lifting, whose minimum over k is the discrete transport cost of
// the winding charges.
enum class JumpConvention { principal, raw };

struct LiftingEdge {
  std::uint32_t a = 0, b = 0; // cell indices
  double dtheta = 0.0;        // base angle difference per convention
  double length = 0.0;        // 1-D: 1 per cut; 2-D: face length
};

struct LiftingProblem {
  CellField base; // base angles in [0, 2*pi) per cell
  JumpCost g;
  int label_bound = 2; // K, max |k|
  JumpConvention convention = JumpConvention::principal;
  double sigma = 0.0; // charge only edges with |jump| >= sigma (0 = all)
  std::vector<LiftingEdge> edges;

  static LiftingProblem build(CellField base, JumpCost g, int label_bound,
                              JumpConvention convention = JumpConvention::principal,
                              double sigma = 0.0);
};

struct LiftingSolution {
  std::vector<int> k; // per cell
  double objective = 0.0;
  std::string optimality_tag; // "exhaustive" or "local_search"
};

// Sum over edges of g(|dtheta + 2*pi*(k_b - k_a)|) * length, restricted to
// |jump| >= sigma. Throws DomainError when a label exceeds the bound.
double mg_objective(const LiftingProblem& problem, const std::vector<int>& k);

// Exact minimizer by exhaustive enumeration with cell 0 gauge-fixed to 0;
// ties resolve to the lexicographically smallest label vector. Throws
// SizeError when (2K+1)^cells > 1e7.
LiftingSolution mg_bruteforce(const LiftingProblem& problem);

// Iterated region-shift moves (BFS regions from random cells, +-1 shifts)
// until no improving move among 2*cells consecutive proposals, plus a
// systematic single-cell polish; best over restarts.
LiftingSolution mg_local_search(const LiftingProblem& problem,
                                std::uint64_t seed, std::size_t restarts);

// Winding of the four cells around the interior vertex between cell (i,j)
// and (i+1, j+1), from principal differences of the cell angles.
int cell_plaquette_winding(const CellField& base, std::size_t i,
                           std::size_t j);

// The vortex map sampled at cell centers.
CellField vortex_cell_field(const GridSpec& grid, double cx, double cy);

// Minimum over perfect matchings of + to - charges of
// sum g(2*pi) * Euclidean distance; exact enumeration, N <= 8 pairs.
double dipole_transport_estimate(const VortexConfig& config,
                                 const JumpCost& g);

struct NormalizedLifting {
  ShiftField shifts;     // per-node integer decomposition vs the reference
  AngleField normalized; // phi - 2*pi * dominant shift
};

// Decomposes each lifting of the common base map as reference + 2*pi*d
// with d integer per node, subtracts the dominant (largest-region) shift,
// and returns the shift bookkeeping. Throws ConsistencyError when some
// field does not lift the same base map as the reference.
std::vector<NormalizedLifting> normalize_mod_2pi(
    const std::vector<AngleField>& phis, const AngleField& reference);

} // namespace atlift
