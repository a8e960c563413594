#include "atlift/functions.hpp"

#include <cmath>

#include "atlift/errors.hpp"

namespace atlift {

PsiSpec make_psi(const std::string& tag) {
  if (tag == "quadratic")
    return {tag, [](double t) { return t * t; },
            [](double t) { return 2.0 * t; }, simd::PsiTag::quadratic};
  if (tag == "linear")
    return {tag, [](double t) { return t; }, [](double) { return 1.0; },
            simd::PsiTag::linear};
  throw ConfigError("unknown psi tag: " + tag);
}

FSpec make_f(const std::string& tag) {
  if (tag == "linear")
    return {tag, [](double t) { return t; }, [](double) { return 1.0; }, 1.0,
            simd::FTag::linear};
  if (tag == "area")
    return {tag, [](double t) { return std::sqrt(1.0 + t * t); },
            [](double t) { return t / std::sqrt(1.0 + t * t); }, 1.0,
            simd::FTag::area};
  if (tag == "catenary")
    return {tag,
            [](double t) { return 2.0 * (std::sqrt(1.0 + 0.25 * t * t) - 1.0); },
            [](double t) { return 0.5 * t / std::sqrt(1.0 + 0.25 * t * t); },
            1.0, simd::FTag::catenary};
  throw ConfigError("unknown f tag: " + tag);
}

WSpec make_w(const std::string& tag) {
  if (tag == "quadratic_well")
    return {tag, [](double s) { return (1.0 - s) * (1.0 - s); },
            [](double s) { return 2.0 * (s - 1.0); },
            simd::WTag::quadratic_well};
  if (tag == "quartic_well")
    return {tag,
            [](double s) {
              const double d = 1.0 - s * s;
              return d * d;
            },
            [](double s) { return -4.0 * s * (1.0 - s * s); },
            simd::WTag::quartic_well};
  throw ConfigError("unknown W tag: " + tag);
}

void EnergyParams::validate() const {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be > 0");
  if (!(eta >= 0.0)) throw DomainError("eta must be >= 0");
  if (g_table_resolution < 2)
    throw ConfigError("g_table_resolution must be >= 2");

  constexpr int kSamples = 200;
  constexpr double kTol = 1e-9;

  // psi: nondecreasing on [0,1], psi(0)=0, psi(1)=1, psi(t)>0 for t>0
  if (std::fabs(psi.value(0.0)) > kTol) throw DomainError("psi(0) must be 0");
  if (std::fabs(psi.value(1.0) - 1.0) > kTol)
    throw DomainError("psi(1) must be 1");
  double prev = psi.value(0.0);
  for (int i = 1; i <= kSamples; ++i) {
    const double t = static_cast<double>(i) / kSamples;
    const double p = psi.value(t);
    if (p < prev - kTol) throw DomainError("psi must be nondecreasing");
    if (!(p > 0.0)) throw DomainError("psi(t) must be > 0 for t > 0");
    prev = p;
  }

  // f: convex nondecreasing, f(t)/t -> recession slope (required 1)
  const double tmax = 20.0, dt = tmax / kSamples;
  double f0 = f.value(0.0), f1 = f.value(dt);
  if (f1 < f0 - kTol) throw DomainError("f must be nondecreasing");
  for (int i = 2; i <= kSamples; ++i) {
    const double f2 = f.value(i * dt);
    if (f2 < f1 - kTol) throw DomainError("f must be nondecreasing");
    if (f2 - 2.0 * f1 + f0 < -1e-7) throw DomainError("f must be convex");
    f0 = f1;
    f1 = f2;
  }
  const double slope = f.value(1e4) / 1e4;
  if (std::fabs(slope - f.recession_slope) > 0.01 * f.recession_slope)
    throw DomainError("f(t)/t at t=1e4 deviates from declared recession");
  if (std::fabs(f.recession_slope - 1.0) > 1e-12)
    throw DomainError("f must have recession slope 1");

  // W: W(1)=0, W > 0 away from 1
  if (std::fabs(W.value(1.0)) > kTol) throw DomainError("W(1) must be 0");
  double wmin = 1e300;
  for (int i = 0; i <= kSamples; ++i) {
    const double s = (1.0 - 1e-3) * static_cast<double>(i) / kSamples;
    wmin = std::min(wmin, W.value(s));
  }
  if (!(wmin > 0.0)) throw DomainError("W must be > 0 on [0, 1-1e-3]");
}

void apply_function_tag(EnergyParams& params, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("expected name=value, got: " + assignment);
  const std::string name = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  if (name == "psi")
    params.psi = make_psi(value);
  else if (name == "f")
    params.f = make_f(value);
  else if (name == "W")
    params.W = make_w(value);
  else
    throw ConfigError("unknown function slot: " + name);
}

} // namespace atlift
