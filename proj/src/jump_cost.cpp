#include "atlift/jump_cost.hpp"

#include <cmath>

#include "atlift/errors.hpp"

namespace atlift {

namespace {

constexpr std::size_t kQuadPanels = 2048; // >= 1024 per contract

double simpson_sqrtW(const EnergyParams& params, double a, double b,
                     std::size_t panels) {
  if (b <= a) return 0.0;
  if (panels % 2) ++panels; // composite Simpson needs an even count
  const double h = (b - a) / static_cast<double>(panels);
  double acc = std::sqrt(params.W.value(a)) + std::sqrt(params.W.value(b));
  for (std::size_t k = 1; k < panels; ++k)
    acc += (k % 2 ? 4.0 : 2.0) * std::sqrt(params.W.value(a + k * h));
  return acc * h / 3.0;
}

// Cumulative table of c_W on a fine uniform t-grid, Simpson per
// subinterval pair; linear interpolation between nodes.
class CwTable {
 public:
  explicit CwTable(const EnergyParams& params) {
    const std::size_t m = kNodes - 1;
    std::vector<double> sq(kNodes);
    for (std::size_t k = 0; k < kNodes; ++k)
      sq[k] = std::sqrt(params.W.value(static_cast<double>(k) / m));
    cw_.assign(kNodes, 0.0);
    const double h = 1.0 / static_cast<double>(m);
    // integral over [t_k, t_{k+1}] via Simpson with the midpoint value
    double acc = 0.0;
    std::vector<double> seg(m);
    for (std::size_t k = 0; k < m; ++k) {
      const double tm = (static_cast<double>(k) + 0.5) * h;
      const double fm = std::sqrt(params.W.value(tm));
      seg[k] = h / 6.0 * (sq[k] + 4.0 * fm + sq[k + 1]);
    }
    for (std::size_t k = m; k-- > 0;) {
      acc += seg[k];
      cw_[k] = 2.0 * acc;
    }
  }

  double operator()(double t) const {
    if (t <= 0.0) return cw_[0];
    if (t >= 1.0) return 0.0;
    const double x = t * (kNodes - 1);
    const std::size_t k = static_cast<std::size_t>(x);
    const double w = x - static_cast<double>(k);
    return cw_[k] * (1.0 - w) + cw_[k + 1] * w;
  }

 private:
  static constexpr std::size_t kNodes = 8193;
  std::vector<double> cw_;
};

GEval minimize_g_objective(const EnergyParams& params, const CwTable& cw,
                           double z) {
  const auto objective = [&](double t) {
    return params.psi.value(t) * z + 2.0 * cw(t);
  };
  const std::size_t n = params.g_table_resolution;
  double best_t = 0.0, best_v = objective(0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    const double v = objective(t);
    if (v < best_v) {
      best_v = v;
      best_t = t;
    }
  }
  const double step = 1.0 / static_cast<double>(n - 1);
  double a = std::max(0.0, best_t - step);
  double b = std::min(1.0, best_t + step);
  // golden-section refinement of the winning bracket
  constexpr double kInvPhi = 0.6180339887498948482;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = objective(x1), f2 = objective(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-12; ++it) {
    if (f1 <= f2) { // ties move left: smallest t wins
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = objective(x2);
    }
  }
  double t_star = 0.5 * (a + b);
  double v_star = objective(t_star);
  if (best_v < v_star || (best_v == v_star && best_t < t_star)) {
    t_star = best_t;
    v_star = best_v;
  }
  return {v_star, t_star};
}

} // namespace

double eval_cW(const EnergyParams& params, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("c_W argument outside [0,1]");
  return 2.0 * simpson_sqrtW(params, t, 1.0, kQuadPanels);
}

GEval eval_g(const EnergyParams& params, double z) {
  if (z < 0.0) throw DomainError("g argument must be >= 0");
  const CwTable cw(params);
  return minimize_g_objective(params, cw, z);
}

JumpCost JumpCost::build(const EnergyParams& params, double z_max,
                         std::size_t n_samples) {
  if (!(z_max > 0.0) || n_samples < 2)
    throw ConfigError("jump cost table needs z_max > 0 and >= 2 samples");
  JumpCost jc;
  jc.params_ = params;
  jc.z_max_ = z_max;
  const CwTable cw(params);
  jc.two_cw0_ = cw(0.0);
  jc.samples_.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double z =
        z_max * static_cast<double>(i) / static_cast<double>(n_samples - 1);
    const GEval e = minimize_g_objective(params, cw, z);
    jc.samples_.push_back({z, e.value, e.argmin_t});
  }
  if (params.psi.tag == "quadratic" && params.W.tag == "quadratic_well")
    jc.closed_form_tag_ = "g(z)=2z/(z+2)";
  return jc;
}

double JumpCost::eval(double z) const {
  if (z < 0.0) throw DomainError("g argument must be >= 0");
  if (samples_.empty()) throw ConfigError("jump cost table not built");
  if (z >= z_max_) return samples_.back().g;
  const double x = z / z_max_ * static_cast<double>(samples_.size() - 1);
  const std::size_t k = static_cast<std::size_t>(x);
  const double w = x - static_cast<double>(k);
  return samples_[k].g * (1.0 - w) + samples_[k + 1].g * w;
}

double JumpCost::argmin(double z) const {
  if (z < 0.0) throw DomainError("g argument must be >= 0");
  if (samples_.empty()) throw ConfigError("jump cost table not built");
  if (z >= z_max_) return samples_.back().t_star;
  const double x = z / z_max_ * static_cast<double>(samples_.size() - 1);
  const std::size_t k = static_cast<std::size_t>(x);
  const double w = x - static_cast<double>(k);
  return samples_[k].t_star * (1.0 - w) + samples_[k + 1].t_star * w;
}

GEval JumpCost::eval_exact(double z) const { return eval_g(params_, z); }

} // namespace atlift
