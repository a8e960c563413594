#pragma once

#include <functional>
#include <optional>
#include <string>

#include "atlift/simd/kernels.hpp"

namespace atlift {

// One of the three model functions, resolved from its config tag. Known
// tags carry a kernel tag so evaluators can run the vectorized maps;
// custom callables go through the generic scalar path.
struct PsiSpec {
  std::string tag;
  std::function<double(double)> value;
  std::function<double(double)> deriv;
  std::optional<simd::PsiTag> kernel;
};

struct FSpec {
  std::string tag;
  std::function<double(double)> value;
  std::function<double(double)> deriv;
  double recession_slope = 1.0;
  std::optional<simd::FTag> kernel;
};

struct WSpec {
  std::string tag;
  std::function<double(double)> value;
  std::function<double(double)> deriv;
  std::optional<simd::WTag> kernel;
};

// Builtin tags: psi in {quadratic, linear}; f in {linear, area, catenary};
// W in {quadratic_well, quartic_well}. Unknown tags raise ConfigError.
PsiSpec make_psi(const std::string& tag);
FSpec make_f(const std::string& tag);
WSpec make_w(const std::string& tag);

struct EnergyParams {
  PsiSpec psi = make_psi("quadratic");
  FSpec f = make_f("linear");
  WSpec W = make_w("quadratic_well");
  double epsilon = 0.1;
  double eta = 1e-6;                  // gradient smoothing length
  std::size_t g_table_resolution = 1024;

  // Sampled checks of the structural hypotheses on (psi, f, W) plus the
  // scalar parameter ranges. Throws DomainError / ConfigError.
  void validate() const;

  EnergyParams with_epsilon(double eps) const {
    EnergyParams p = *this;
    p.epsilon = eps;
    return p;
  }
};

// Parse "psi=quadratic" / "f=linear" / "W=quadratic_well" assignments into
// an EnergyParams, leaving unmentioned entries at their defaults.
void apply_function_tag(EnergyParams& params, const std::string& assignment);

} // namespace atlift
