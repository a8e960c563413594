// Acceptance suite: one pass/fail line per criterion. Run with no
// arguments for the full suite or with criterion names (e.g. "A3 A5") for
// a subset. Exit status 0 iff every executed criterion passed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "atlift/energy.hpp"
#include "atlift/experiment.hpp"
#include "atlift/fields.hpp"
#include "atlift/jump_cost.hpp"
#include "atlift/lifting.hpp"
#include "atlift/minimize.hpp"

using namespace atlift;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << "FAILED: " << what;
    }
  }
  void note(const std::string& what) {
    if (detail.tellp() > 0) detail << "; ";
    detail << what;
  }
};

std::string out_root() {
  const fs::path p = fs::temp_directory_path() / "atlift_acceptance";
  fs::create_directories(p);
  return p.string();
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo +
         (hi - lo) * static_cast<double>(rng() >> 11) / 9007199254740992.0;
}

// cached expensive runs shared between criteria (A3/A7 feed A9)
std::optional<RunReport>& a3_report() {
  static std::optional<RunReport> rep;
  return rep;
}
std::optional<RunReport>& a7_report() {
  static std::optional<RunReport> rep;
  return rep;
}

RunReport run_a3() {
  if (!a3_report()) {
    ExperimentConfig cfg = parse_experiment_config(R"json({
      "kind": "gamma_1d_step",
      "name": "a3_gamma_1d_step",
      "schedule": {"epsilons": [0.1, 0.05, 0.025, 0.0125],
                   "max_outer_iters": 60, "tol_energy": 1e-7},
      "scenario": {"delta": 1.5707963267948966, "mode": "lifting",
                   "cells_per_eps": 8},
      "seed": 2024
    })json");
    cfg.out_dir = out_root();
    a3_report() = run_experiment(cfg);
  }
  return *a3_report();
}

RunReport run_a7() {
  if (!a7_report()) {
    ExperimentConfig cfg = parse_experiment_config(R"json({
      "kind": "dichotomy_dipole",
      "name": "a7_dichotomy",
      "grid": {"dim": 2, "extent": [1.0, 1.0], "resolution": [9, 9]},
      "schedule": {"epsilons": [0.1, 0.05, 0.025, 0.0125],
                   "max_outer_iters": 60, "tol_energy": 1e-7},
      "scenario": {"datum": "dipole", "distance": 0.5, "cells_per_eps": 8,
                   "wall_cells": 48, "label_bound": 1, "restarts": 6},
      "seed": 2024
    })json");
    cfg.out_dir = out_root();
    a7_report() = run_experiment(cfg);
  }
  return *a7_report();
}

// ---- criteria ---------------------------------------------------------------

// g closed form: numeric g matches 2z/(z+2) to 1e-4 on 200 points in [0,10]
Outcome a1() {
  Check c;
  EnergyParams p;
  double max_err = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double z = 10.0 * static_cast<double>(i) / 199.0;
    const double closed = 2.0 * z / (z + 2.0);
    max_err = std::max(max_err, std::fabs(eval_g(p, z).value - closed));
  }
  c.require(max_err <= 1e-4, "max |g - 2z/(z+2)| <= 1e-4");
  {
    std::ostringstream s;
    s.precision(3);
    s << "max err " << max_err;
    c.note(s.str());
  }
  return {c.ok, c.detail.str()};
}

// six truncation properties for three (psi, W) pairs
Outcome a2() {
  Check c;
  struct Pair {
    const char* psi;
    const char* W;
  };
  for (const Pair pair : {Pair{"quadratic", "quadratic_well"},
                          Pair{"linear", "quadratic_well"},
                          Pair{"quadratic", "quartic_well"}}) {
    EnergyParams p;
    p.psi = make_psi(pair.psi);
    p.W = make_w(pair.W);
    const std::string tag =
        std::string(pair.psi) + "/" + pair.W + ": ";
    const double two_cw0 = 2.0 * eval_cW(p, 0.0);

    std::vector<double> zs, gs;
    for (int i = 0; i <= 160; ++i) zs.push_back(20.0 * i / 160.0);
    for (const double z : zs) gs.push_back(eval_g(p, z).value);

    // 1. increasing, g(0)=0, limit 2 c_W(0)
    c.require(std::fabs(gs[0]) <= 1e-10, tag + "g(0)=0");
    bool incr = true;
    for (std::size_t i = 1; i < gs.size(); ++i)
      if (gs[i] < gs[i - 1] - 1e-10) incr = false;
    c.require(incr, tag + "g nondecreasing");
    const double far = eval_g(p, 1e4).value;
    c.require(std::fabs(far - two_cw0) <= 0.01 * two_cw0,
              tag + "g(1e4) within 1% of 2c_W(0)");

    // 2. subadditive on a 50 x 50 grid
    std::vector<double> sub_z, sub_g;
    for (int i = 0; i < 50; ++i) sub_z.push_back(10.0 * (i + 1) / 50.0);
    for (const double z : sub_z) sub_g.push_back(eval_g(p, z).value);
    bool subadd = true;
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 50; ++j) {
        const double gsum = eval_g(p, sub_z[i] + sub_z[j]).value;
        if (gsum > sub_g[i] + sub_g[j] + 1e-9) subadd = false;
      }
    c.require(subadd, tag + "subadditivity");

    // 3. Lipschitz constant 1 on sampled pairs
    bool lip = true;
    for (std::size_t i = 0; i < gs.size(); ++i)
      for (std::size_t j = i + 1; j < gs.size(); ++j)
        if (std::fabs(gs[i] - gs[j]) > std::fabs(zs[i] - zs[j]) + 1e-9)
          lip = false;
    c.require(lip, tag + "1-Lipschitz");

    // 4. g(z) <= z and g(z)/z -> 1
    bool below = true;
    for (std::size_t i = 0; i < gs.size(); ++i)
      if (gs[i] > zs[i] + 1e-10) below = false;
    c.require(below, tag + "g(z) <= z");
    const double ratio = eval_g(p, 1e-3).value / 1e-3;
    c.require(ratio >= 0.99 && ratio <= 1.0 + 1e-9,
              tag + "g(1e-3)/1e-3 in [0.99, 1]");

    // 5. z <= c_T g(z) on (0, T]
    double worst = 0.0;
    bool positive = true;
    for (std::size_t i = 1; i < gs.size(); ++i) {
      if (zs[i] > 10.0) break;
      if (!(gs[i] > 0.0)) positive = false;
      else worst = std::max(worst, zs[i] / gs[i]);
    }
    c.require(positive && worst < 1e6, tag + "z <= c_T g(z) on (0,10]");

    // 6. g(z) >= C_sigma for z >= sigma
    for (const double sigma : {0.1, 0.5, 1.0}) {
      const double c_sigma = eval_g(p, sigma).value;
      c.require(c_sigma > 0.0, tag + "C_sigma > 0");
      bool floor_ok = true;
      for (std::size_t i = 0; i < gs.size(); ++i)
        if (zs[i] >= sigma && gs[i] < c_sigma - 1e-10) floor_ok = false;
      c.require(floor_ok, tag + "g >= C_sigma past sigma");
    }
  }
  return {c.ok, c.detail.str()};
}

// 1-D Gamma-curve: extrapolated limit within 5% of g(pi/2)
Outcome a3() {
  Check c;
  const RunReport rep = run_a3();
  const double rel = rep.numbers.at("rel_err_arc");
  c.require(rel <= 0.05, "extrapolated limit within 5% of g(pi/2)");
  std::ostringstream s;
  s.precision(4);
  s << "extrapolated " << rep.numbers.at("extrapolated") << ", target "
    << rep.numbers.at("target_arc") << ", rel err " << rel;
  c.note(s.str());
  return {c.ok, c.detail.str()};
}

// transition profile cost within 2% of 2 c_W(t) at eps = 1e-3
Outcome a4() {
  Check c;
  EnergyParams p;
  for (const double t : {0.0, 0.25, 0.5}) {
    const double target = 2.0 * eval_cW(p, t);
    const auto res = mm_profile_1d(t, 1e-3, p, 1.0, 16001);
    const double rel = std::fabs(res.cost - target) / target;
    std::ostringstream s;
    s.precision(4);
    s << "t=" << t << ": cost " << res.cost << " vs " << target;
    c.note(s.str());
    c.require(rel <= 0.02, "profile cost within 2% at t");
    c.require(res.cost >= target - 1e-6, "coarea lower bound at t");
  }
  return {c.ok, c.detail.str()};
}

// local search equals brute force on 100 random instances, <= 9 cells, K=1
Outcome a5() {
  Check c;
  std::mt19937_64 rng(777);
  EnergyParams p;
  const JumpCost jc = JumpCost::build(p, kTwoPi * 4.0, 8192);
  double worst = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const int shape = static_cast<int>(rng() % 4);
    const std::size_t nx = shape == 0 ? 4 + rng() % 6 : (shape == 3 ? 3 : 2);
    const std::size_t ny = shape == 0 ? 0 : (shape == 2 ? 3 : (shape == 3 ? 3 : 2));
    const GridSpec g = ny == 0 ? GridSpec::line(1.0, nx + 1)
                               : GridSpec::box(1.0, 1.0, nx + 1, ny + 1);
    CellField base = CellField::constant(g, 0.0);
    for (double& v : base.values) v = uniform(rng, 0.0, kTwoPi);
    const LiftingProblem prob = LiftingProblem::build(base, jc, 1);
    const double ob = mg_bruteforce(prob).objective;
    const double ol = mg_local_search(prob, 5000 + inst, 12).objective;
    worst = std::max(worst, std::fabs(ob - ol));
  }
  c.require(worst <= 1e-12, "all 100 instances match to 1e-12");
  std::ostringstream s;
  s.precision(3);
  s << "worst objective gap " << worst;
  c.note(s.str());
  return {c.ok, c.detail.str()};
}

// vortex obstruction at every refinement + dipole wall consistency
Outcome a6() {
  Check c;
  EnergyParams p;
  const JumpCost jc = JumpCost::build(p, kTwoPi * 6.0, 8192);

  for (const double h : {1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0}) {
    const GridSpec g = GridSpec::box(2.0 * h, 2.0 * h, 3, 3);
    const CellField core = vortex_cell_field(g, h, h);
    c.require(cell_plaquette_winding(core, 0, 0) == 1, "core winds +1");
    const LiftingProblem prob = LiftingProblem::build(core, jc, 2);
    const double obj = mg_bruteforce(prob).objective;
    std::ostringstream s;
    s.precision(4);
    s << "h=" << h << ": obstruction " << obj;
    c.note(s.str());
    c.require(obj > 0.0, "obstruction objective > 0");
  }

  for (const double d : {0.25, 0.375, 0.5}) {
    const std::size_t n = 32;
    const GridSpec g = GridSpec::box(1.0, 1.0, n + 1, n + 1);
    VortexConfig cfg;
    cfg.vortices.push_back({0.5 - 0.5 * d, 0.5, +1});
    cfg.vortices.push_back({0.5 + 0.5 * d, 0.5, -1});
    CellField base{g, std::vector<double>(g.cells())};
    for (std::size_t j = 0; j < g.cells_y(); ++j)
      for (std::size_t i = 0; i < g.cells_x(); ++i) {
        double phi = 0.0;
        for (const Vortex& v : cfg.vortices)
          phi += v.charge * std::atan2(cell_center_y(g, j) - v.y,
                                       cell_center_x(g, i) - v.x);
        base.cell(i, j) = wrap_2pi(phi);
      }
    const LiftingProblem wall =
        LiftingProblem::build(base, jc, 1, JumpConvention::raw, kPi);
    const double mg = mg_local_search(wall, 99, 8).objective;
    const double oracle = dipole_transport_estimate(cfg, jc);
    const double rel = std::fabs(mg - oracle) / oracle;
    std::ostringstream s;
    s.precision(4);
    s << "d=" << d << ": mg " << mg << " vs transport " << oracle;
    c.note(s.str());
    c.require(rel <= 0.08, "dipole mg within 8% of the transport oracle");
  }
  return {c.ok, c.detail.str()};
}

// dichotomy: extrapolated gap within 10% of g(2 pi) * 0.5, nonnegative gap
Outcome a7() {
  Check c;
  const RunReport rep = run_a7();
  const double gap = rep.numbers.at("gap_extrapolated");
  const double target = rep.numbers.at("target_gap");
  const double rel = rep.numbers.at("gap_rel_err");
  c.require(rel <= 0.10, "gap within 10% of g(2 pi) * distance");
  c.require(rep.numbers.at("sign_ok") == 1.0,
            "lifting energy >= direct energy at every epsilon");
  std::ostringstream s;
  s.precision(4);
  s << "gap " << gap << ", target " << target << ", rel err " << rel
    << ", mg wall " << rep.numbers.at("mg_wall") << ", transport "
    << rep.numbers.at("transport_estimate");
  c.note(s.str());
  return {c.ok, c.detail.str()};
}

// recovery upper bound for the minimal dipole lifting
Outcome a8() {
  Check c;
  EnergyParams p;
  const JumpCost jc = JumpCost::build(p, kTwoPi * 4.0, 8192);
  const double eps_min = 0.0125;
  const std::size_t n =
      static_cast<std::size_t>(std::lround(8.0 / eps_min)) + 1;
  const GridSpec g = GridSpec::box(1.0, 1.0, n, n);
  VortexConfig cfg;
  cfg.vortices.push_back({0.25, 0.5, +1});
  cfg.vortices.push_back({0.75, 0.5, -1});
  const SharpLiftingTarget target = dipole_lifting_target(g, cfg);
  const Schedule sched{{0.1, 0.05, 0.025, eps_min}, 40, 1e-6, 1e-8};
  const RecoveryResult res = recovery_sequence(target, p, sched, jc);
  const double last = res.items.back().energy.total;
  c.require(last <= 1.05 * res.target_total,
            "F_eps <= 1.05 * F_lift(target) at the smallest epsilon");
  std::ostringstream s;
  s.precision(5);
  s << "F_eps " << last << " vs 1.05 * " << res.target_total << " (bulk "
    << res.target_bulk << " + jumps " << res.target_jump_cost << ")";
  c.note(s.str());
  return {c.ok, c.detail.str()};
}

// descent monotonicity and gradient checks on the A3/A7 runs
Outcome a9() {
  Check c;
  const RunReport r3 = run_a3();
  const RunReport r7 = run_a7();
  c.require(r3.numbers.at("monotone_ok") == 1.0, "A3 traces monotone");
  c.require(r7.numbers.at("monotone_ok") == 1.0, "A7 traces monotone");
  c.require(r3.numbers.at("grad_check_max") <= 1e-5,
            "A3 gradient check <= 1e-5");
  c.require(r7.numbers.at("grad_check_max") <= 1e-5,
            "A7 gradient check <= 1e-5");
  std::ostringstream s;
  s.precision(3);
  s << "grad checks: A3 " << r3.numbers.at("grad_check_max") << ", A7 "
    << r7.numbers.at("grad_check_max");
  c.note(s.str());
  return {c.ok, c.detail.str()};
}

} // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> all = {
      {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4}, {"A5", a5},
      {"A6", a6}, {"A7", a7}, {"A8", a8}, {"A9", a9}};

  std::vector<std::string> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(argv[i]);

  bool all_pass = true;
  for (const auto& [name, fn] : all) {
    if (!wanted.empty()) {
      bool match = false;
      for (const std::string& w : wanted)
        if (w == name) match = true;
      if (!match) continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start)
            .count();
    std::printf("[%s] %s (%.1f s) %s\n", name.c_str(),
                out.pass ? "PASS" : "FAIL", secs, out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) all_pass = false;
  }
  return all_pass ? 0 : 1;
}
