#pragma once

#include <optional>
#include <string>
#include <vector>

#include "atlift/functions.hpp"

namespace atlift {

// c_W(t) = 2 * integral_t^1 sqrt(W(s)) ds, composite Simpson quadrature
// with at least 1024 panels. Throws DomainError outside [0,1].
double eval_cW(const EnergyParams& params, double t);

struct GEval {
  double value = 0.0;
  double argmin_t = 0.0;
};

// g(z) = min over t in [0,1] of psi(t) z + 2 c_W(t), computed on a uniform
// grid of g_table_resolution points followed by golden-section refinement
// of the best bracket; ties resolve to the smallest t. Throws DomainError
// for z < 0.
GEval eval_g(const EnergyParams& params, double z);

struct GSample {
  double z, g, t_star;
};

// Dense monotone table of g with its minimizers, for the solver hot loops
// and the CSV export. eval() interpolates linearly (g is 1-Lipschitz, so
// the table error is second order in the spacing); eval_exact() reruns the
// minimization.
class JumpCost {
 public:
  JumpCost() = default;
  static JumpCost build(const EnergyParams& params, double z_max = 40.0,
                        std::size_t n_samples = 4096);

  double eval(double z) const;        // interpolated
  double argmin(double z) const;      // interpolated t*(z)
  GEval eval_exact(double z) const;

  double two_cw0() const { return two_cw0_; }
  double z_max() const { return z_max_; }
  const std::vector<GSample>& samples() const { return samples_; }
  const std::optional<std::string>& closed_form_tag() const {
    return closed_form_tag_;
  }
  const EnergyParams& params() const { return params_; }

 private:
  EnergyParams params_;
  std::vector<GSample> samples_;
  double z_max_ = 0.0;
  double two_cw0_ = 0.0;
  std::optional<std::string> closed_form_tag_;
};

} // namespace atlift
