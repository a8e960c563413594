#include <doctest.h>

#include <cmath>
#include <random>

#include "atlift/energy.hpp"
#include "atlift/errors.hpp"
#include "atlift/minimize.hpp"

using namespace atlift;

TEST_CASE("schedule validation") {
  Schedule s{{0.1, 0.05}, 10, 1e-6, 1e-8};
  CHECK_NOTHROW(s.validate());
  CHECK_THROWS_AS((Schedule{{0.05, 0.1}, 10, 1e-6, 1e-8}.validate()),
                  ConfigError);
  CHECK_THROWS_AS((Schedule{{}, 10, 1e-6, 1e-8}.validate()), ConfigError);
  CHECK_THROWS_AS((Schedule{{0.1}, 10, 0.0, 1e-8}.validate()), ConfigError);
  CHECK_THROWS_AS(parse_mode("both"), ConfigError);
}

TEST_CASE("v step: zero forcing gives v = 1, constants match stationarity") {
  EnergyParams p;
  p.epsilon = 0.05;

  const GridSpec g = GridSpec::box(1.0, 1.0, 17, 17);
  const ScalarField v1 = v_step(AngleField::constant(g, 0.3),
                                ScalarField::constant(g, 0.2), p, g);
  for (const double x : v1.values) CHECK(std::fabs(x - 1.0) < 1e-8);

  // single-cell limit with constant slope c: v = (1/eps)/(f(c) + 1/eps)
  const GridSpec g1 = GridSpec::line(1.0, 2);
  const double c = 3.0;
  AngleField ramp{g1, {0.0, c}};
  for (const double eps : {0.2, 0.05, 1e-3}) {
    EnergyParams pe = p.with_epsilon(eps);
    const ScalarField v =
        v_step(ramp, ScalarField::constant(g1, 1.0), pe, g1);
    const double expected = (1.0 / eps) / (c + 1.0 / eps);
    CHECK(std::fabs(v.values[0] - expected) < 1e-6);
    CHECK(std::fabs(v.values[1] - expected) < 1e-6);
  }
  // eps -> 0: v -> 1 pointwise
  EnergyParams tiny = p.with_epsilon(1e-5);
  const ScalarField vt = v_step(ramp, ScalarField::constant(g1, 1.0), tiny, g1);
  CHECK(vt.values[0] > 0.999);
}

TEST_CASE("v step optimality: random perturbations never help") {
  EnergyParams p;
  p.epsilon = 0.08;
  const GridSpec g = GridSpec::box(1.0, 1.0, 21, 21);
  AngleField phi{g, std::vector<double>(g.nodes())};
  for (std::size_t j = 0; j < g.res[1]; ++j)
    for (std::size_t i = 0; i < g.res[0]; ++i)
      phi.values[g.node_index(i, j)] =
          1.5 * std::sin(kPi * g.node_x(i)) * g.node_y(j);
  const ScalarField v = v_step(phi, ScalarField::constant(g, 1.0), p, g);

  const auto objective = [&](const ScalarField& w) {
    return eval_F_eps_lifting(phi, w, p, g).total;
  };
  const double base = objective(v);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    ScalarField w = v;
    for (std::size_t n = 0; n < w.values.size(); ++n) {
      const double dir =
          2.0 * static_cast<double>(rng() >> 11) / 9007199254740992.0 - 1.0;
      w.values[n] = std::clamp(w.values[n] + 1e-3 * dir, 0.0, 1.0);
    }
    CHECK(objective(w) >= base - 1e-8);
  }
}

TEST_CASE("v step falls back to descent for non-default psi") {
  EnergyParams p;
  p.psi = make_psi("linear");
  p.epsilon = 0.05;
  const GridSpec g = GridSpec::line(1.0, 33);
  AngleField ramp{g, std::vector<double>(g.nodes())};
  for (std::size_t i = 0; i < g.res[0]; ++i)
    ramp.values[i] = 2.0 * g.node_x(i);
  const ScalarField v0 = ScalarField::constant(g, 1.0);
  const ScalarField v = v_step(ramp, v0, p, g);
  CHECK(eval_F_eps_lifting(ramp, v, p, g).total <=
        eval_F_eps_lifting(ramp, v0, p, g).total);
  for (const double x : v.values) {
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
  }
}

TEST_CASE("u step lifting: zero weight is a fixed point; pinned ramp") {
  EnergyParams p;
  p.epsilon = 0.05;
  const GridSpec g = GridSpec::line(1.0, 41);
  AngleField phi{g, std::vector<double>(g.nodes())};
  for (std::size_t i = 0; i < g.res[0]; ++i)
    phi.values[i] = std::sin(3.0 * g.node_x(i));

  const AngleField same =
      u_step_lifting(phi, ScalarField::constant(g, 0.0), p, g);
  CHECK(same.values == phi.values);

  // Dirichlet-pinned ends with strictly convex f: the minimizer is the
  // linear interpolant (independent 1-D convex-solve oracle)
  EnergyParams pa = p;
  pa.f = make_f("area");
  const double a = 1.3;
  AngleField init{g, std::vector<double>(g.nodes(), 0.0)};
  init.values.back() = a;
  MinimizeOptions opts;
  opts.pinned = boundary_pin_mask(g);
  opts.max_u_iters = 20000;
  opts.tol_step = 1e-12;
  AngleField out = init;
  for (int sweep = 0; sweep < 6; ++sweep)
    out = u_step_lifting(out, ScalarField::constant(g, 1.0), pa, g, opts);
  for (std::size_t i = 0; i < g.res[0]; ++i)
    CHECK(std::fabs(out.values[i] - a * g.node_x(i)) < 2e-3);
}

TEST_CASE("u step lifting: gradient concentrates in a low-psi channel") {
  EnergyParams p;
  const GridSpec g = GridSpec::line(1.0, 81);
  ScalarField v = ScalarField::constant(g, 1.0);
  for (std::size_t i = 38; i <= 42; ++i) v.values[i] = 0.05; // channel

  AngleField init{g, std::vector<double>(g.nodes(), 0.0)};
  for (std::size_t i = 0; i < g.res[0]; ++i)
    init.values[i] = kPi / 2.0 * g.node_x(i); // uniform slope candidate
  MinimizeOptions opts;
  opts.pinned = boundary_pin_mask(g);
  opts.max_u_iters = 20000;
  AngleField out = init;
  for (int sweep = 0; sweep < 4; ++sweep) out = u_step_lifting(out, v, p, g, opts);

  const auto bulk = [&](const AngleField& f) {
    return eval_F_eps_lifting(f, v, p, g).bulk;
  };
  CHECK(bulk(out) < bulk(init));
  // variation drains toward the channel (first-order descent moves it
  // from the channel edges inward, so assert the trend, not the limit)
  const double inside0 = init.values[43] - init.values[37];
  const double inside = out.values[43] - out.values[37];
  CHECK(inside > 1.5 * inside0);
}

TEST_CASE("u step direct: fixed point and winding preservation") {
  EnergyParams p;
  p.epsilon = 0.1;
  const GridSpec g = GridSpec::box(1.0, 1.0, 33, 33);
  const CircleField flat = CircleField::constant(g, 0.7);
  const CircleField same =
      u_step_direct(flat, ScalarField::constant(g, 1.0), p, g);
  CHECK(same.theta == flat.theta);

  VortexConfig cfg;
  cfg.vortices.push_back(snap_to_cell_center(g, {0.3, 0.5, +1}));
  cfg.vortices.push_back(snap_to_cell_center(g, {0.7, 0.5, -1}));
  CircleField u = make_dipole_map(g, cfg);
  const auto before = scan_windings(u);
  MinimizeOptions opts;
  opts.pinned = boundary_pin_mask(g);
  opts.max_u_iters = 50;
  const ScalarField v = v_step(u, ScalarField::constant(g, 1.0), p, g);
  u = u_step_direct(u, v, p, g, opts);
  const auto after = scan_windings(u);
  REQUIRE(before.size() == after.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(before[i].i == after[i].i);
    CHECK(before[i].j == after[i].j);
    CHECK(before[i].w == after[i].w);
  }
}

TEST_CASE("alternate minimize: constant init converges immediately to zero") {
  EnergyParams p;
  const Schedule sched{{0.1, 0.05}, 20, 1e-6, 1e-8};
  const GridSpec g = GridSpec::line(1.0, 33);
  const MinimizeResult res =
      alternate_minimize(AngleField::constant(g, 0.4), p, sched);
  CHECK(res.energy.total <= 1e-10);
  CHECK(res.trace.size() <= 4);
}

TEST_CASE("alternate minimize: 1-D step reaches the g(pi/2) level") {
  EnergyParams p;
  const double eps = 0.0125;
  const GridSpec g = GridSpec::line(1.0, 321); // h = eps/4
  AngleField init{g, std::vector<double>(g.nodes(), 0.0)};
  for (std::size_t i = 0; i < g.res[0]; ++i)
    init.values[i] = g.node_x(i) < 0.5 ? 0.0 : kPi / 2.0;
  MinimizeOptions opts;
  opts.pinned = boundary_pin_mask(g);
  opts.max_u_iters = 2000;
  EnergyParams pe = p;
  pe.eta = 1e-6;
  const Schedule sched{{eps}, 40, 1e-6, 1e-8};
  const MinimizeResult res = alternate_minimize(init, pe, sched, opts);

  const double target = 2.0 * kPi / (kPi + 4.0); // g(pi/2)
  CHECK(std::fabs(res.energy.total - target) < 0.10 * target);

  // monotone trace up to the relative tolerance
  for (std::size_t i = 1; i < res.trace.size(); ++i)
    CHECK(res.trace[i].total <=
          res.trace[i - 1].total * (1.0 + 1e-6) + 1e-12);
}

TEST_CASE("mode equivalence at zero degree") {
  EnergyParams p;
  const GridSpec g = GridSpec::box(1.0, 1.0, 41, 41);
  AngleField phi{g, std::vector<double>(g.nodes())};
  for (std::size_t j = 0; j < g.res[1]; ++j)
    for (std::size_t i = 0; i < g.res[0]; ++i)
      phi.values[g.node_index(i, j)] = 0.8 * std::sin(kPi * g.node_x(i)) *
                                       std::sin(kPi * g.node_y(j));
  CircleField u{g, std::vector<double>(g.nodes())};
  for (std::size_t n = 0; n < g.nodes(); ++n)
    u.theta[n] = wrap_2pi(phi.values[n]);

  MinimizeOptions opts;
  opts.pinned = boundary_pin_mask(g);
  const Schedule sched{{0.1, 0.05}, 30, 1e-7, 1e-9};
  const MinimizeResult rl = alternate_minimize(phi, p, sched, opts);
  const MinimizeResult rd = alternate_minimize(u, p, sched, opts);
  CHECK(std::fabs(rl.energy.total - rd.energy.total) <=
        0.01 * std::max(rl.energy.total, rd.energy.total));
}

TEST_CASE("gradient check: analytic vs centered differences") {
  EnergyParams p;
  const GridSpec g = GridSpec::box(1.0, 1.0, 25, 25);
  AngleField phi{g, std::vector<double>(g.nodes())};
  for (std::size_t j = 0; j < g.res[1]; ++j)
    for (std::size_t i = 0; i < g.res[0]; ++i)
      phi.values[g.node_index(i, j)] =
          1.1 * std::sin(2.0 * g.node_x(i) + 0.3) * g.node_y(j);
  ScalarField v = ScalarField::constant(g, 0.7);
  CHECK(gradient_fd_check(phi, v, p, g, 10, 99) < 1e-5);

  CircleField u{g, std::vector<double>(g.nodes())};
  for (std::size_t n = 0; n < g.nodes(); ++n)
    u.theta[n] = wrap_2pi(phi.values[n]);
  CHECK(gradient_fd_check(u, v, p, g, 10, 99) < 1e-5);
}

TEST_CASE("transition profile costs approach 2 c_W") {
  EnergyParams p;
  const auto r1 = mm_profile_1d(1.0, 1e-2, p, 1.0, 801);
  CHECK(r1.cost <= 1e-10);
  for (const double x : r1.profile.values) CHECK(x == doctest::Approx(1.0));

  const auto r0 = mm_profile_1d(0.0, 1e-3, p, 1.0, 16001);
  CHECK(std::fabs(r0.cost - 2.0) < 0.02 * 2.0);
  CHECK(r0.cost >= 2.0 - 1e-6); // coarea lower bound

  const auto rh = mm_profile_1d(0.5, 1e-3, p, 1.0, 16001);
  CHECK(std::fabs(rh.cost - 0.5) < 0.02 * 0.5);

  CHECK_THROWS_AS(mm_profile_1d(-0.1, 1e-3, p, 1.0, 101), DomainError);
}

TEST_CASE("recovery: no jumps, single pi/2 jump, and a 2 pi wall") {
  EnergyParams p;
  const JumpCost jc = JumpCost::build(p, 20.0, 8192);
  const Schedule sched{{0.1, 0.05, 0.025}, 40, 1e-6, 1e-8};

  // no jump curves: v = 1 and the energy is bulk only
  SharpLiftingTarget flat;
  flat.grid = GridSpec::line(1.0, 201);
  flat.branch = [](double x, double) { return 0.3 * x; };
  const RecoveryResult r0 = recovery_sequence(flat, p, sched, jc);
  for (const auto& item : r0.items) {
    CHECK(item.energy.phase_field <= 1e-12);
    CHECK(std::fabs(item.energy.total - r0.target_bulk) < 1e-2);
  }

  // 1-D step: energy approaches bulk + g(delta)
  const GridSpec g1 = GridSpec::line(1.0, 1601);
  const SharpLiftingTarget step = step_lifting_target(g1, kPi / 2.0);
  const RecoveryResult rs =
      recovery_sequence(step, p, Schedule{{0.05, 0.025, 0.0125}, 40, 1e-6, 1e-8}, jc);
  const double ghalfpi = 2.0 * kPi / (kPi + 4.0);
  CHECK(std::fabs(rs.target_jump_cost - ghalfpi) < 1e-4);
  CHECK(rs.items.back().energy.total <= 1.05 * rs.target_total);

  // synthetic 2 pi wall: the measured cost approaches g(2 pi)
  SharpLiftingTarget wall;
  wall.grid = GridSpec::line(1.0, 1601);
  wall.branch = [](double x, double) { return x < 0.5 ? 0.0 : kTwoPi; };
  wall.curves.push_back({0.5, 0.0, 0.5, 0.0});
  const RecoveryResult rw =
      recovery_sequence(wall, p, Schedule{{0.025, 0.0125}, 40, 1e-6, 1e-8}, jc);
  const double g2pi = kTwoPi / (kPi + 1.0);
  CHECK(std::fabs(rw.items.back().energy.total - g2pi) < 0.05 * g2pi);

  // overlapping layers at coarse epsilon
  SharpLiftingTarget twin = wall;
  twin.branch = [](double x, double) {
    return (x < 0.49 ? 0.0 : kTwoPi) + (x < 0.51 ? 0.0 : -kTwoPi);
  };
  twin.curves = {{0.49, 0.0, 0.49, 0.0}, {0.51, 0.0, 0.51, 0.0}};
  CHECK_THROWS_AS(
      recovery_sequence(twin, p, Schedule{{0.1}, 40, 1e-6, 1e-8}, jc),
      LayerCollisionError);
}

TEST_CASE("prolongation reproduces linear fields") {
  const GridSpec coarse = GridSpec::box(1.0, 1.0, 9, 9);
  const GridSpec fine = GridSpec::box(1.0, 1.0, 33, 33);
  ScalarField f{coarse, std::vector<double>(coarse.nodes())};
  for (std::size_t j = 0; j < coarse.res[1]; ++j)
    for (std::size_t i = 0; i < coarse.res[0]; ++i)
      f.values[coarse.node_index(i, j)] =
          0.3 * coarse.node_x(i) - 1.7 * coarse.node_y(j);
  const ScalarField pf = prolong(f, fine);
  for (std::size_t j = 0; j < fine.res[1]; ++j)
    for (std::size_t i = 0; i < fine.res[0]; ++i)
      CHECK(pf.values[fine.node_index(i, j)] ==
            doctest::Approx(0.3 * fine.node_x(i) - 1.7 * fine.node_y(j))
                .epsilon(1e-12));
}
