#include "atlift/lifting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "atlift/errors.hpp"

namespace atlift {

LiftingProblem LiftingProblem::build(CellField base, JumpCost g,
                                     int label_bound,
                                     JumpConvention convention,
                                     double sigma) {
  if (label_bound < 1) throw ConfigError("label bound K must be >= 1");
  if (sigma < 0.0) throw DomainError("sigma must be >= 0");
  base.grid.validate();
  if (base.values.size() != base.grid.cells())
    throw DimensionError("cell field size mismatch");

  LiftingProblem p;
  p.g = std::move(g);
  p.label_bound = label_bound;
  p.convention = convention;
  p.sigma = sigma;

  const GridSpec& grid = base.grid;
  const std::size_t cx = grid.cells_x();
  const std::size_t cy = grid.dim == 2 ? grid.cells_y() : 1;
  const auto diff = [&](double tb, double ta) {
    const double raw = tb - ta;
    return convention == JumpConvention::raw ? raw : principal_angle(raw);
  };
  for (std::size_t j = 0; j < cy; ++j)
    for (std::size_t i = 0; i < cx; ++i) {
      const std::uint32_t a = static_cast<std::uint32_t>(j * cx + i);
      if (i + 1 < cx)
        p.edges.push_back({a, a + 1, diff(base.values[a + 1], base.values[a]),
                           grid.dim == 1 ? 1.0 : grid.h(1)});
      if (grid.dim == 2 && j + 1 < cy)
        p.edges.push_back({a, static_cast<std::uint32_t>(a + cx),
                           diff(base.values[a + cx], base.values[a]),
                           grid.h(0)});
    }
  p.base = std::move(base);
  return p;
}

namespace {

double edge_cost(const LiftingProblem& p, const LiftingEdge& e, int ka,
                 int kb) {
  const double jump = std::fabs(e.dtheta + kTwoPi * (kb - ka));
  if (jump < p.sigma) return 0.0;
  return p.g.eval(jump) * e.length;
}

void check_labels(const LiftingProblem& p, const std::vector<int>& k) {
  if (k.size() != p.base.values.size())
    throw DimensionError("shift field size mismatch");
  for (const int v : k)
    if (v < -p.label_bound || v > p.label_bound)
      throw DomainError("shift label out of bounds");
}

} // namespace

double mg_objective(const LiftingProblem& p, const std::vector<int>& k) {
  check_labels(p, k);
  double total = 0.0;
  for (const LiftingEdge& e : p.edges)
    total += edge_cost(p, e, k[e.a], k[e.b]);
  return total;
}

LiftingSolution mg_bruteforce(const LiftingProblem& p) {
  const std::size_t cells = p.base.values.size();
  const double labels = 2.0 * p.label_bound + 1.0;
  if (std::pow(labels, static_cast<double>(cells)) > 1e7)
    throw SizeError("brute force bound exceeded: (2K+1)^cells > 1e7");

  std::vector<int> k(cells, 0);
  // gauge: cell 0 fixed at 0; remaining labels sweep [-K, K] in
  // lexicographic order, most significant first
  for (std::size_t c = 1; c < cells; ++c) k[c] = -p.label_bound;
  std::vector<int> best = k;
  double best_obj = std::numeric_limits<double>::infinity();
  bool done = cells == 0;
  while (!done) {
    double obj = 0.0;
    for (const LiftingEdge& e : p.edges)
      obj += edge_cost(p, e, k[e.a], k[e.b]);
    if (obj < best_obj) {
      best_obj = obj;
      best = k;
    }
    // odometer: last index fastest, so visiting order is lexicographic
    std::size_t c = cells;
    while (true) {
      if (c == 1) {
        done = true;
        break;
      }
      --c;
      if (k[c] < p.label_bound) {
        ++k[c];
        break;
      }
      k[c] = -p.label_bound;
    }
    if (cells == 1) done = true;
  }
  if (cells == 0) best_obj = 0.0;
  return {std::move(best), best_obj, "exhaustive"};
}

namespace {

struct CellAdjacency {
  // per cell: incident edge indices
  std::vector<std::vector<std::uint32_t>> edges_of;
  std::vector<std::vector<std::uint32_t>> neighbors_of;
};

CellAdjacency build_adjacency(const LiftingProblem& p) {
  CellAdjacency adj;
  const std::size_t cells = p.base.values.size();
  adj.edges_of.resize(cells);
  adj.neighbors_of.resize(cells);
  for (std::uint32_t e = 0; e < p.edges.size(); ++e) {
    adj.edges_of[p.edges[e].a].push_back(e);
    adj.edges_of[p.edges[e].b].push_back(e);
    adj.neighbors_of[p.edges[e].a].push_back(p.edges[e].b);
    adj.neighbors_of[p.edges[e].b].push_back(p.edges[e].a);
  }
  return adj;
}

// Cost change of shifting `region` (marked in in_region) by `s`.
double region_move_delta(const LiftingProblem& p,
                         const CellAdjacency& adj,
                         const std::vector<int>& k,
                         const std::vector<std::uint32_t>& region,
                         const std::vector<std::uint8_t>& in_region, int s) {
  double delta = 0.0;
  for (const std::uint32_t c : region)
    for (const std::uint32_t ei : adj.edges_of[c]) {
      const LiftingEdge& e = p.edges[ei];
      const bool ina = in_region[e.a], inb = in_region[e.b];
      if (ina && inb) {
        // count interior edges once (from their a endpoint)
        if (c != e.a) continue;
        continue; // both endpoints shift: jump unchanged
      }
      const int ka = k[e.a] + (ina ? s : 0);
      const int kb = k[e.b] + (inb ? s : 0);
      delta += edge_cost(p, e, ka, kb) - edge_cost(p, e, k[e.a], k[e.b]);
    }
  return delta;
}

bool region_within_bounds(const std::vector<int>& k,
                          const std::vector<std::uint32_t>& region, int s,
                          int bound) {
  for (const std::uint32_t c : region) {
    const int v = k[c] + s;
    if (v < -bound || v > bound) return false;
  }
  return true;
}

} // namespace

LiftingSolution mg_local_search(const LiftingProblem& p, std::uint64_t seed,
                                std::size_t restarts) {
  const std::size_t cells = p.base.values.size();
  if (restarts == 0) restarts = 1;
  const CellAdjacency adj = build_adjacency(p);
  std::mt19937_64 rng(seed);

  std::vector<int> best;
  double best_obj = std::numeric_limits<double>::infinity();

  std::vector<std::uint8_t> in_region(cells, 0);
  std::vector<std::uint32_t> region;
  region.reserve(cells);

  for (std::size_t r = 0; r < restarts; ++r) {
    std::vector<int> k(cells, 0);
    if (r > 0)
      for (std::size_t c = 0; c < cells; ++c)
        k[c] = static_cast<int>(rng() % (2 * p.label_bound + 1)) -
               p.label_bound;
    double obj = mg_objective(p, k);

    const std::size_t failure_budget = 2 * cells;
    std::size_t failures = 0;
    while (failures < failure_budget) {
      const std::uint32_t start = static_cast<std::uint32_t>(rng() % cells);
      region.clear();
      std::uint64_t flavor = rng() % 3;
      const std::size_t gcx = p.base.grid.cells_x();
      const std::size_t gcy =
          p.base.grid.dim == 2 ? p.base.grid.cells_y() : 1;
      if (flavor == 2 && (gcx < 2 && gcy < 2)) flavor = 0;
      if (flavor == 2 && p.base.grid.dim == 2) {
        // axis-aligned half-grid below/left of a random cut; relocates
        // straight walls in one move
        bool horizontal = rng() & 1;
        if (gcy < 2) horizontal = false;
        if (gcx < 2) horizontal = true;
        if (horizontal) {
          const std::size_t cut = 1 + rng() % (gcy - 1);
          for (std::size_t j = 0; j < cut; ++j)
            for (std::size_t i = 0; i < gcx; ++i) {
              region.push_back(static_cast<std::uint32_t>(j * gcx + i));
              in_region[region.back()] = 1;
            }
        } else {
          const std::size_t cut = 1 + rng() % (gcx - 1);
          for (std::size_t j = 0; j < gcy; ++j)
            for (std::size_t i = 0; i < cut; ++i) {
              region.push_back(static_cast<std::uint32_t>(j * gcx + i));
              in_region[region.back()] = 1;
            }
        }
      } else if (flavor == 2) {
        // 1-D half-line
        const std::size_t cut = 1 + rng() % (gcx - 1);
        for (std::size_t i = 0; i < cut; ++i) {
          region.push_back(static_cast<std::uint32_t>(i));
          in_region[region.back()] = 1;
        }
      } else if (flavor == 0) {
        // plain BFS ball with a random size target
        region.push_back(start);
        in_region[start] = 1;
        const std::size_t want = 1 + rng() % cells;
        for (std::size_t head = 0;
             head < region.size() && region.size() < want; ++head)
          for (const std::uint32_t nb : adj.neighbors_of[region[head]]) {
            if (in_region[nb] || region.size() >= want) continue;
            in_region[nb] = 1;
            region.push_back(nb);
          }
      } else {
        region.push_back(start);
        in_region[start] = 1;
        // sheet: the connected component of the start cell bounded by the
        // current walls (edges already carrying a large lifted jump);
        // shifting a whole sheet relocates walls without tearing new ones
        const double wall = std::max(p.sigma, 0.5 * kPi);
        for (std::size_t head = 0; head < region.size(); ++head) {
          const std::uint32_t c = region[head];
          for (const std::uint32_t ei : adj.edges_of[c]) {
            const LiftingEdge& e = p.edges[ei];
            const std::uint32_t nb = e.a == c ? e.b : e.a;
            if (in_region[nb]) continue;
            const double jump =
                std::fabs(e.dtheta + kTwoPi * (k[e.b] - k[e.a]));
            if (jump >= wall) continue;
            in_region[nb] = 1;
            region.push_back(nb);
          }
        }
      }
      const int s = (rng() & 1) ? 1 : -1;

      bool improved = false;
      if (region_within_bounds(k, region, s, p.label_bound)) {
        const double delta =
            region_move_delta(p, adj, k, region, in_region, s);
        if (delta < -1e-15) {
          for (const std::uint32_t c : region) k[c] += s;
          obj += delta;
          improved = true;
        }
      }
      for (const std::uint32_t c : region) in_region[c] = 0;
      failures = improved ? 0 : failures + 1;
    }

    // systematic single-cell polish until fixpoint
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::uint32_t c = 0; c < cells; ++c)
        for (const int s : {1, -1}) {
          if (k[c] + s < -p.label_bound || k[c] + s > p.label_bound) continue;
          region.assign(1, c);
          in_region[c] = 1;
          const double delta =
              region_move_delta(p, adj, k, region, in_region, s);
          in_region[c] = 0;
          if (delta < -1e-15) {
            k[c] += s;
            obj += delta;
            changed = true;
          }
        }
    }

    const double canonical = mg_objective(p, k);
    if (canonical < best_obj) {
      best_obj = canonical;
      best = std::move(k);
    }
  }
  return {std::move(best), best_obj, "local_search"};
}

int cell_plaquette_winding(const CellField& base, std::size_t i,
                           std::size_t j) {
  const GridSpec& g = base.grid;
  if (g.dim != 2) throw DimensionError("cell plaquette winding needs 2-D");
  if (i + 1 >= g.cells_x() || j + 1 >= g.cells_y())
    throw DimensionError("cell plaquette index out of range");
  const double t00 = base.cell(i, j), t10 = base.cell(i + 1, j);
  const double t11 = base.cell(i + 1, j + 1), t01 = base.cell(i, j + 1);
  const double s =
      principal_angle(t10 - t00) + principal_angle(t11 - t10) +
      principal_angle(t01 - t11) + principal_angle(t00 - t01);
  return static_cast<int>(std::lround(s / kTwoPi));
}

CellField vortex_cell_field(const GridSpec& grid, double cx, double cy) {
  grid.validate();
  if (grid.dim != 2) throw DimensionError("vortex cell field needs 2-D");
  CellField out{grid, std::vector<double>(grid.cells())};
  for (std::size_t j = 0; j < grid.cells_y(); ++j)
    for (std::size_t i = 0; i < grid.cells_x(); ++i)
      out.cell(i, j) = wrap_2pi(std::atan2(cell_center_y(grid, j) - cy,
                                           cell_center_x(grid, i) - cx));
  return out;
}

double dipole_transport_estimate(const VortexConfig& config,
                                 const JumpCost& g) {
  std::vector<const Vortex*> plus, minus;
  for (const Vortex& v : config.vortices) {
    if (v.charge == 1)
      plus.push_back(&v);
    else if (v.charge == -1)
      minus.push_back(&v);
    else
      throw ConfigError("transport estimate needs +-1 charges");
  }
  if (plus.size() != minus.size())
    throw ConfigError("transport estimate needs balanced charges");
  if (plus.size() > 8)
    throw ConfigError("transport estimate enumerates up to 8 pairs");
  if (plus.empty()) return 0.0;

  const double g2pi = g.eval_exact(kTwoPi).value;
  std::vector<std::size_t> perm(minus.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t i = 0; i < plus.size(); ++i)
      cost += g2pi * std::hypot(plus[i]->x - minus[perm[i]]->x,
                                plus[i]->y - minus[perm[i]]->y);
    best = std::min(best, cost);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::vector<NormalizedLifting> normalize_mod_2pi(
    const std::vector<AngleField>& phis, const AngleField& reference) {
  std::vector<NormalizedLifting> out;
  out.reserve(phis.size());
  const GridSpec& grid = reference.grid;
  const std::size_t nn = grid.nodes();
  for (const AngleField& phi : phis) {
    if (!grid.same_shape(phi.grid))
      throw DimensionError("normalize: field shapes differ");
    ShiftField d{grid, std::vector<std::int64_t>(nn, 0)};
    for (std::size_t n = 0; n < nn; ++n) {
      const double q = (phi.values[n] - reference.values[n]) / kTwoPi;
      const double r = std::round(q);
      if (std::fabs(q - r) > 1e-9)
        throw ConsistencyError(
            "field does not lift the same base map as the reference");
      d.values[n] = static_cast<std::int64_t>(r);
    }
    // dominant shift = the one covering the most nodes (ties: smallest)
    std::int64_t dominant = 0;
    {
      std::vector<std::pair<std::int64_t, std::size_t>> counts;
      for (const std::int64_t v : d.values) {
        bool found = false;
        for (auto& [val, cnt] : counts)
          if (val == v) {
            ++cnt;
            found = true;
            break;
          }
        if (!found) counts.push_back({v, 1});
      }
      std::size_t best_count = 0;
      for (const auto& [val, cnt] : counts)
        if (cnt > best_count || (cnt == best_count && val < dominant)) {
          best_count = cnt;
          dominant = val;
        }
    }
    AngleField norm{grid, std::vector<double>(nn)};
    for (std::size_t n = 0; n < nn; ++n)
      norm.values[n] =
          phi.values[n] - kTwoPi * static_cast<double>(dominant);
    out.push_back({std::move(d), std::move(norm)});
  }
  return out;
}

} // namespace atlift
