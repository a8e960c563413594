#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "atlift/energy.hpp"
#include "atlift/fields.hpp"
#include "atlift/functions.hpp"
#include "atlift/jump_cost.hpp"

namespace atlift {

struct Schedule {
  std::vector<double> epsilons; // strictly decreasing, positive
  std::size_t max_outer_iters = 40;
  double tol_energy = 1e-6; // relative outer-loop stop
  double tol_step = 1e-8;   // nodewise sup stop for the descent steps

  void validate() const;
};

enum class MinimizeMode { lifting, direct };
MinimizeMode parse_mode(const std::string& tag);

struct MinimizeOptions {
  // Dirichlet mask: 1 = node frozen at its initial value. Empty = all free.
  std::vector<std::uint8_t> pinned;
  std::size_t max_u_iters = 600;
  double tol_step = 1e-8; // sup-norm stop for one u step
  // per-iteration sup bound on angle updates in direct mode, in units of h
  double direct_step_cap = kPi;
};

std::vector<std::uint8_t> boundary_pin_mask(const GridSpec& grid);

struct TracePoint {
  double epsilon = 0.0;
  std::size_t outer_iter = 0;
  double bulk = 0.0;
  double phase_field = 0.0;
  double total = 0.0;
};

struct MinimizeResult {
  MinimizeMode mode = MinimizeMode::lifting;
  AngleField phi;  // valid in lifting mode
  CircleField u;   // valid in direct mode
  ScalarField v;
  EnergyBreakdown energy;
  std::vector<TracePoint> trace;
};

// Exact phase-field update for fixed u: solves the stationarity system of
// the discrete energy in v (conjugate gradients with Jacobi scaling,
// residual <= 1e-10 relative to the right-hand side) when (psi, W) are the
// quadratic defaults, projected descent otherwise; the result is clamped
// to [0,1] and never increases the energy against v_init.
ScalarField v_step(const AngleField& phi, const ScalarField& v_init,
                   const EnergyParams& params, const GridSpec& grid);
ScalarField v_step(const CircleField& u, const ScalarField& v_init,
                   const EnergyParams& params, const GridSpec& grid);

// Descent with backtracking line search on the bulk term at fixed v;
// monotone by construction. Throws StepError if no decreasing step exists
// while the gradient is still large.
AngleField u_step_lifting(const AngleField& phi, const ScalarField& v,
                          const EnergyParams& params, const GridSpec& grid,
                          const MinimizeOptions& opts = {});
CircleField u_step_direct(const CircleField& u, const ScalarField& v,
                          const EnergyParams& params, const GridSpec& grid,
                          const MinimizeOptions& opts = {});

MinimizeResult alternate_minimize(const AngleField& init,
                                  const EnergyParams& params,
                                  const Schedule& schedule,
                                  const MinimizeOptions& opts = {});
MinimizeResult alternate_minimize(const CircleField& init,
                                  const EnergyParams& params,
                                  const Schedule& schedule,
                                  const MinimizeOptions& opts = {});

// 1-D transition-profile problem: v pinned to 1 at both interval ends and
// to t_anchor at the midpoint node, energy sum of eps|v'|^2 + W(v)/eps.
struct MmProfileResult {
  ScalarField profile;
  double cost = 0.0;
};
MmProfileResult mm_profile_1d(double t_anchor, double epsilon,
                              const EnergyParams& params, double half_width,
                              std::size_t nodes);

// ---- recovery construction --------------------------------------------

// Straight jump curve; in 1-D only x0 is used (a cut point).
struct JumpSegment {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  double length(int dim) const;
};

// A sharp lifting candidate: smooth branch sampled pointwise, jumping
// across the listed curves.
struct SharpLiftingTarget {
  GridSpec grid;
  std::function<double(double, double)> branch;
  std::vector<JumpSegment> curves;
};

SharpLiftingTarget dipole_lifting_target(const GridSpec& grid,
                                         const VortexConfig& config);
SharpLiftingTarget step_lifting_target(const GridSpec& grid, double delta);

struct RecoveryItem {
  double epsilon = 0.0;
  AngleField phi;
  ScalarField v;
  EnergyBreakdown energy;
};

struct RecoveryResult {
  std::vector<RecoveryItem> items;
  double target_bulk = 0.0;
  double target_jump_cost = 0.0; // sum of g(|z|) * curve length
  double target_total = 0.0;
};

// For each epsilon: the phase field dips to the g-minimizer t*(|z|) in an
// O(eps)-layer around each jump curve with the optimal transition profile,
// and the angle ramps linearly across an inner band. Throws
// LayerCollisionError when two curve layers overlap at some epsilon.
RecoveryResult recovery_sequence(const SharpLiftingTarget& target,
                                 const EnergyParams& params,
                                 const Schedule& schedule, const JumpCost& g);

// ---- diagnostics -------------------------------------------------------

// Max mixed relative/absolute deviation between the analytic descent
// direction and centered finite differences at n_probes random free nodes.
double gradient_fd_check(const AngleField& phi, const ScalarField& v,
                         const EnergyParams& params, const GridSpec& grid,
                         std::size_t n_probes, std::uint64_t seed,
                         const std::vector<std::uint8_t>& pinned = {});
double gradient_fd_check(const CircleField& u, const ScalarField& v,
                         const EnergyParams& params, const GridSpec& grid,
                         std::size_t n_probes, std::uint64_t seed,
                         const std::vector<std::uint8_t>& pinned = {});

// Linear interpolation onto a finer (or equal) grid, for continuation
// across the per-epsilon grids.
ScalarField prolong(const ScalarField& f, const GridSpec& fine);
CircleField prolong(const CircleField& u, const GridSpec& fine);

} // namespace atlift
