#include <doctest.h>

#include <cmath>

#include "atlift/errors.hpp"
#include "atlift/fields.hpp"

using namespace atlift;

TEST_CASE("angle wrapping") {
  CHECK(wrap_2pi(0.0) == 0.0);
  CHECK(wrap_2pi(kTwoPi) == 0.0);
  CHECK(wrap_2pi(-0.5) == doctest::Approx(kTwoPi - 0.5));
  CHECK(principal_angle(kPi) == doctest::Approx(kPi));
  CHECK(principal_angle(-kPi) == doctest::Approx(kPi));
  CHECK(principal_angle(kTwoPi - 0.25) == doctest::Approx(-0.25));
}

TEST_CASE("step map pieces and chordal gaps") {
  const GridSpec g = GridSpec::line(1.0, 11);
  const CircleField u = make_step_map(g, kPi / 2.0);
  CHECK(u.theta[0] == 0.0);
  CHECK(u.theta[10] == doctest::Approx(kPi / 2.0));
  for (std::size_t i = 0; i < 5; ++i) CHECK(u.theta[i] == 0.0);
  for (std::size_t i = 5; i < 11; ++i)
    CHECK(u.theta[i] == doctest::Approx(kPi / 2.0));

  const auto chord = [](double a, double b) {
    return std::hypot(std::cos(a) - std::cos(b), std::sin(a) - std::sin(b));
  };
  CHECK(chord(0.0, kPi) == doctest::Approx(2.0));
  CHECK(std::fabs(chord(0.0, kPi / 2.0) - std::sqrt(2.0)) < 1e-12);

  CHECK_THROWS_AS(make_step_map(g, 0.0), DomainError);
  CHECK_THROWS_AS(make_step_map(g, kPi + 0.1), DomainError);
}

TEST_CASE("dipole map windings match the declared charges") {
  const GridSpec g = GridSpec::box(1.0, 1.0, 33, 33);
  VortexConfig cfg;
  cfg.vortices.push_back(snap_to_cell_center(g, {0.25, 0.5, +1}));
  cfg.vortices.push_back(snap_to_cell_center(g, {0.75, 0.5, -1}));
  const CircleField u = make_dipole_map(g, cfg);

  const auto charges = scan_windings(u);
  REQUIRE(charges.size() == 2);
  int total = 0;
  for (const auto& c : charges) total += c.w;
  CHECK(total == 0);
  // windings sit at the cells containing the singularities
  for (const auto& c : charges) {
    const double cx = cell_center_x(g, c.i), cy = cell_center_y(g, c.j);
    bool found = false;
    for (const auto& v : cfg.vortices)
      if (std::fabs(v.x - cx) < g.h(0) && std::fabs(v.y - cy) < g.h(1))
        found = true;
    CHECK(found);
  }

  // empty config: constant field, zero winding
  const CircleField flat = make_dipole_map(g, VortexConfig{});
  CHECK(scan_windings(flat).empty());

  // two balanced pairs: 4 windings, zero sum
  VortexConfig two;
  two.vortices.push_back(snap_to_cell_center(g, {0.2, 0.3, +1}));
  two.vortices.push_back(snap_to_cell_center(g, {0.8, 0.3, -1}));
  two.vortices.push_back(snap_to_cell_center(g, {0.2, 0.7, +1}));
  two.vortices.push_back(snap_to_cell_center(g, {0.8, 0.7, -1}));
  const auto four = scan_windings(make_dipole_map(g, two));
  CHECK(four.size() == 4);
  int sum = 0;
  for (const auto& c : four) sum += c.w;
  CHECK(sum == 0);

  VortexConfig unbalanced;
  unbalanced.vortices.push_back({0.5, 0.5, +1});
  CHECK_THROWS_AS(make_dipole_map(g, unbalanced), ConfigError);
}

TEST_CASE("plaquette winding of the vortex map and its conjugate") {
  const GridSpec g = GridSpec::box(1.0, 1.0, 3, 3);
  CircleField u{g, std::vector<double>(9, 0.0)};
  // vortex at the domain center (0.5, 0.5), inside cell (... the 2x2 grid
  // of cells has its center vertex there); evaluate the vortex angle at
  // the nodes
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < 3; ++i)
      u.theta[g.node_index(i, j)] = wrap_2pi(
          std::atan2(g.node_y(j) - 0.49, g.node_x(i) - 0.49));
  // the four plaquettes around (0.49, 0.49): the one containing it winds +1
  int total = 0;
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t i = 0; i < 2; ++i) total += plaquette_winding(u, i, j);
  CHECK(total == 1);

  CircleField conj = u;
  for (double& t : conj.theta) t = wrap_2pi(-t);
  int ctotal = 0;
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t i = 0; i < 2; ++i) ctotal += plaquette_winding(conj, i, j);
  CHECK(ctotal == -1);

  const CircleField flat = CircleField::constant(g, 1.2);
  CHECK(plaquette_winding(flat, 0, 0) == 0);

  // antipodal corners: edge difference exactly pi
  CircleField degen = flat;
  degen.theta[g.node_index(1, 0)] = wrap_2pi(1.2 + kPi);
  CHECK_THROWS_AS(plaquette_winding(degen, 0, 0),
                  DegeneratePlaquetteError);
}

TEST_CASE("discrete Stokes: plaquette sum equals the boundary loop winding") {
  const GridSpec g = GridSpec::box(1.0, 1.0, 25, 25);
  VortexConfig cfg;
  cfg.vortices.push_back(snap_to_cell_center(g, {0.3, 0.5, +1}));
  cfg.vortices.push_back(snap_to_cell_center(g, {0.7, 0.5, -1}));
  const CircleField u = make_dipole_map(g, cfg);
  for (const auto [i0, i1, j0, j1] :
       {std::array<std::size_t, 4>{0, 12, 0, 24}, {0, 24, 0, 24},
        {2, 10, 3, 20}}) {
    int interior = 0;
    for (std::size_t j = j0; j < j1; ++j)
      for (std::size_t i = i0; i < i1; ++i)
        interior += plaquette_winding(u, i, j);
    CHECK(interior == loop_winding(u, i0, i1, j0, j1));
  }
}

TEST_CASE("lift_field is a right inverse of exponentiation") {
  const GridSpec g = GridSpec::line(1.0, 9);
  const CircleField u = make_step_map(g, kPi / 2.0);

  const AngleField phi0 = lift_field(u, ShiftField::constant(g, 0));
  CHECK(phi0.values == u.theta);

  const AngleField phi3 = lift_field(u, ShiftField::constant(g, 3));
  for (std::size_t n = 0; n < g.nodes(); ++n) {
    CHECK(phi3.values[n] == doctest::Approx(u.theta[n] + 3 * kTwoPi));
    CHECK(wrap_2pi(phi3.values[n]) == doctest::Approx(u.theta[n]));
  }

  // k jumping by +1 at the same edge as the base step: the lifted jump
  // stacks to pi/2 + 2 pi
  ShiftField k = ShiftField::constant(g, 0);
  for (std::size_t i = 4; i < 9; ++i) k.values[i] = 1;
  const AngleField phi = lift_field(u, k);
  CHECK(phi.values[4] - phi.values[3] ==
        doctest::Approx(kPi / 2.0 + kTwoPi));

  ShiftField wrong{GridSpec::line(1.0, 5), std::vector<std::int64_t>(5, 0)};
  CHECK_THROWS_AS(lift_field(u, wrong), DimensionError);
}

TEST_CASE("sigma jump length on piecewise-constant cell fields") {
  const GridSpec g = GridSpec::line(1.0, 11); // 10 cells, h = 0.1
  CellField phi = CellField::constant(g, 0.7);
  CHECK(sigma_jump_length(phi, 0.0) == 0.0);
  CHECK(sigma_jump_length(phi, 2.0) == 0.0);

  for (std::size_t c = 5; c < 10; ++c) phi.values[c] = 0.7 + kPi / 2.0;
  CHECK(sigma_jump_length(phi, 0.0) == doctest::Approx(0.1));
  CHECK(sigma_jump_length(phi, kPi / 2.0) == doctest::Approx(0.1));
  CHECK(sigma_jump_length(phi, kPi / 2.0 + 0.01) == 0.0);
  CHECK_THROWS_AS(sigma_jump_length(phi, -1.0), DomainError);

  // 2-D: a vertical cut of 4 cells with h_y face lengths
  const GridSpec g2 = GridSpec::box(1.0, 1.0, 5, 5);
  CellField psi2 = CellField::constant(g2, 0.0);
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t i = 2; i < 4; ++i) psi2.cell(i, j) = 1.0;
  CHECK(sigma_jump_length(psi2, 0.5) == doctest::Approx(4 * 0.25));
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(GridSpec::line(1.0, 1), DimensionError);
  CHECK_THROWS_AS(GridSpec::box(0.0, 1.0, 4, 4), DimensionError);
  const GridSpec g = GridSpec::box(2.0, 1.0, 5, 3);
  CHECK(g.h(0) == doctest::Approx(0.5));
  CHECK(g.h(1) == doctest::Approx(0.5));
  CHECK(g.cells() == 8);
  CHECK(g.nodes() == 15);
}
