#include "atlift/experiment.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include <json.hpp>

#include "atlift/errors.hpp"
#include "atlift/field_io.hpp"
#include "atlift/jump_cost.hpp"
#include "atlift/report.hpp"

namespace atlift {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string>& experiment_kind_names() {
  static const std::vector<std::string> names = {
      "g_table",          "gamma_1d_step", "mm_profile",
      "dichotomy_dipole", "mg_solve",      "transport_compare"};
  return names;
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  const auto& names = experiment_kind_names();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<ExperimentKind>(i);
  throw ConfigError("unknown experiment kind: " + name);
}

std::optional<double> richardson_extrapolate(
    const std::vector<double>& epsilons, const std::vector<double>& values) {
  if (epsilons.size() != values.size() || epsilons.size() < 3) return {};
  const std::size_t n = epsilons.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = n - 3; i < n; ++i) {
    sx += epsilons[i];
    sy += values[i];
    sxx += epsilons[i] * epsilons[i];
    sxy += epsilons[i] * values[i];
  }
  const double det = 3.0 * sxx - sx * sx;
  if (det == 0.0) return {};
  return (sy * sxx - sx * sxy) / det;
}

// ---- config parsing --------------------------------------------------------

namespace {

const json* find(const json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double num_or(const json& j, const char* key, double dflt) {
  if (const json* v = find(j, key)) {
    if (!v->is_number()) throw ConfigError(std::string("field '") + key +
                                           "' must be a number");
    return v->get<double>();
  }
  return dflt;
}

std::size_t count_or(const json& j, const char* key, std::size_t dflt) {
  if (const json* v = find(j, key)) {
    if (!v->is_number_unsigned())
      throw ConfigError(std::string("field '") + key +
                        "' must be a nonnegative integer");
    return v->get<std::size_t>();
  }
  return dflt;
}

std::string str_or(const json& j, const char* key, const std::string& dflt) {
  if (const json* v = find(j, key)) {
    if (!v->is_string())
      throw ConfigError(std::string("field '") + key + "' must be a string");
    return v->get<std::string>();
  }
  return dflt;
}

ExperimentConfig parse_one(const json& j) {
  if (!j.is_object()) throw ConfigError("experiment config must be an object");
  const json* kind = find(j, "kind");
  if (!kind || !kind->is_string())
    throw ConfigError("missing required string field 'kind'");

  ExperimentConfig c;
  c.kind = parse_experiment_kind(kind->get<std::string>());
  c.name = str_or(j, "name", kind->get<std::string>());
  c.seed = static_cast<std::uint64_t>(count_or(j, "seed", 1));
  c.out_dir = str_or(j, "out_dir", "out");

  if (const json* p = find(j, "params")) {
    c.params.psi = make_psi(str_or(*p, "psi", "quadratic"));
    c.params.f = make_f(str_or(*p, "f", "linear"));
    c.params.W = make_w(str_or(*p, "W", "quadratic_well"));
    c.eta_rel = num_or(*p, "eta_rel", 1e-6);
    c.params.g_table_resolution = count_or(*p, "g_table_resolution", 1024);
  }

  if (const json* g = find(j, "grid")) {
    const int dim = static_cast<int>(num_or(*g, "dim", 1));
    std::array<double, 2> extent{1.0, 1.0};
    std::array<std::size_t, 2> res{101, 101};
    if (const json* e = find(*g, "extent")) {
      if (!e->is_array() || e->empty())
        throw ConfigError("field 'extent' must be a nonempty array");
      for (std::size_t a = 0; a < std::min<std::size_t>(2, e->size()); ++a)
        extent[a] = (*e)[a].get<double>();
    }
    if (const json* r = find(*g, "resolution")) {
      if (!r->is_array() || r->empty())
        throw ConfigError("field 'resolution' must be a nonempty array");
      for (std::size_t a = 0; a < std::min<std::size_t>(2, r->size()); ++a)
        res[a] = (*r)[a].get<std::size_t>();
    }
    c.grid = dim == 1 ? GridSpec::line(extent[0], res[0])
                      : GridSpec::box(extent[0], extent[1], res[0], res[1]);
  } else if (c.kind == ExperimentKind::dichotomy_dipole ||
             c.kind == ExperimentKind::mg_solve ||
             c.kind == ExperimentKind::transport_compare) {
    c.grid = GridSpec::box(1.0, 1.0, 101, 101);
  }

  if (const json* s = find(j, "schedule")) {
    if (const json* e = find(*s, "epsilons")) {
      c.schedule.epsilons.clear();
      for (const auto& x : *e) c.schedule.epsilons.push_back(x.get<double>());
    }
    c.schedule.max_outer_iters = count_or(*s, "max_outer_iters", 40);
    c.schedule.tol_energy = num_or(*s, "tol_energy", 1e-6);
    c.schedule.tol_step = num_or(*s, "tol_step", 1e-8);
    c.schedule.validate();
  }

  if (const json* sc = find(j, "scenario")) {
    c.delta = num_or(*sc, "delta", c.delta);
    c.mode = parse_mode(str_or(*sc, "mode", "lifting"));
    c.datum = str_or(*sc, "datum", c.datum);
    c.distance = num_or(*sc, "distance", c.distance);
    c.amplitude = num_or(*sc, "amplitude", c.amplitude);
    c.t_anchor = num_or(*sc, "t_anchor", c.t_anchor);
    c.half_width = num_or(*sc, "half_width", c.half_width);
    c.cells_per_eps = count_or(*sc, "cells_per_eps", c.cells_per_eps);
    c.z_max = num_or(*sc, "z_max", c.z_max);
    c.samples = count_or(*sc, "samples", c.samples);
    c.base = str_or(*sc, "base", c.base);
    c.label_bound = static_cast<int>(num_or(*sc, "label_bound", c.label_bound));
    const std::string conv = str_or(*sc, "convention", "principal");
    if (conv == "principal")
      c.convention = JumpConvention::principal;
    else if (conv == "raw")
      c.convention = JumpConvention::raw;
    else
      throw ConfigError("field 'convention' must be principal or raw");
    c.sigma = num_or(*sc, "sigma", c.sigma);
    c.solver = str_or(*sc, "solver", c.solver);
    c.restarts = count_or(*sc, "restarts", c.restarts);
    c.wall_cells = count_or(*sc, "wall_cells", c.wall_cells);
    c.metric = parse_jump_metric(str_or(*sc, "metric", "arc"));
    if (const json* cl = find(*sc, "cells")) {
      if (!cl->is_array() || cl->empty())
        throw ConfigError("field 'cells' must be a nonempty array");
      for (std::size_t a = 0; a < std::min<std::size_t>(2, cl->size()); ++a)
        c.cells[a] = (*cl)[a].get<std::size_t>();
      if (cl->size() == 1) c.cells[1] = 0;
    }
    if (const json* dp = find(*sc, "dipole")) {
      if (!dp->is_array())
        throw ConfigError("field 'dipole' must be an array of [x,y,charge]");
      for (const auto& row : *dp) {
        if (!row.is_array() || row.size() != 3)
          throw ConfigError("dipole entries must be [x, y, charge]");
        c.dipole.vortices.push_back({row[0].get<double>(),
                                     row[1].get<double>(),
                                     row[2].get<int>()});
      }
    }
  }
  c.echo = j.dump(2);
  return c;
}

} // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_one(j);
}

std::vector<ExperimentConfig> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error in ") + path + ": " +
                      e.what());
  }
  std::vector<ExperimentConfig> out;
  if (j.is_array()) {
    std::size_t idx = 0;
    for (const auto& item : j) {
      ExperimentConfig c = parse_one(item);
      if (!find(item, "name"))
        c.name += "_" + std::to_string(idx);
      ++idx;
      out.push_back(std::move(c));
    }
  } else {
    out.push_back(parse_one(j));
  }
  return out;
}

// ---- run helpers -----------------------------------------------------------

namespace {

class Emitter {
 public:
  Emitter(const ExperimentConfig& cfg) : cfg_(cfg) {
    dir_ = (fs::path(cfg.out_dir) / cfg.name).string();
    fs::create_directories(dir_);
  }

  std::ofstream open_csv(const std::string& name, const std::string& header) {
    files_.push_back(name);
    std::ofstream out(fs::path(dir_) / name, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + name);
    out << header << "\n";
    return out;
  }

  std::string path_of(const std::string& name) {
    return (fs::path(dir_) / name).string();
  }

  void note_file(const std::string& name) { files_.push_back(name); }

  RunReport finish(std::map<std::string, double> numbers) {
    // manifest: config echo + content hash per emitted file
    json manifest;
    manifest["config"] = json::parse(cfg_.echo);
    manifest["config_sha1"] = sha1_hex(cfg_.echo);
    json files = json::object();
    for (const std::string& f : files_) files[f] = sha1_file(path_of(f));
    manifest["files"] = files;
    {
      std::ofstream out(fs::path(dir_) / "run_manifest.json",
                        std::ios::binary);
      out << manifest.dump(2) << "\n";
    }
    RunReport rep;
    rep.kind = cfg_.kind;
    rep.dir = dir_;
    rep.numbers = std::move(numbers);
    rep.files = files_;
    rep.files.push_back("run_manifest.json");
    return rep;
  }

 private:
  const ExperimentConfig& cfg_;
  std::string dir_;
  std::vector<std::string> files_;
};

std::string fmt(double x) { return format_double(x); }

bool trace_monotone(const std::vector<TracePoint>& trace, double rel_tol) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i].epsilon != trace[i - 1].epsilon) continue;
    if (trace[i].total >
        trace[i - 1].total * (1.0 + rel_tol) + 1e-12)
      return false;
  }
  return true;
}

void write_trace_csv(Emitter& io, const std::vector<TracePoint>& trace) {
  auto out = io.open_csv("trace.csv", "epsilon,outer_iter,bulk,phase_field,total");
  for (const TracePoint& t : trace)
    out << fmt(t.epsilon) << "," << t.outer_iter << "," << fmt(t.bulk) << ","
        << fmt(t.phase_field) << "," << fmt(t.total) << "\n";
}

void write_curve_csv(Emitter& io, const std::string& name,
                     const std::vector<double>& eps,
                     const std::vector<EnergyBreakdown>& pts) {
  auto out = io.open_csv(name, "epsilon,bulk,phase_field,jump,transport,total");
  for (std::size_t i = 0; i < eps.size(); ++i)
    out << fmt(eps[i]) << "," << fmt(pts[i].bulk) << ","
        << fmt(pts[i].phase_field) << "," << fmt(pts[i].jump) << ","
        << fmt(pts[i].transport) << "," << fmt(pts[i].total) << "\n";
}

void write_summary_csv(Emitter& io,
                       const std::map<std::string, double>& numbers) {
  auto out = io.open_csv("summary.csv", "quantity,value");
  for (const auto& [k, v] : numbers) out << k << "," << fmt(v) << "\n";
}

GridSpec grid_for_epsilon(double extent_x, double extent_y, int dim,
                          double eps, std::size_t cells_per_eps) {
  const double h = eps / static_cast<double>(cells_per_eps);
  const std::size_t nx =
      static_cast<std::size_t>(std::lround(extent_x / h)) + 1;
  if (dim == 1) return GridSpec::line(extent_x, nx);
  const std::size_t ny =
      static_cast<std::size_t>(std::lround(extent_y / h)) + 1;
  return GridSpec::box(extent_x, extent_y, nx, ny);
}

VortexConfig raw_dipole(const ExperimentConfig& cfg, const GridSpec& grid) {
  VortexConfig config = cfg.dipole;
  if (config.vortices.empty()) {
    const double cx = 0.5 * grid.extent[0], cy = 0.5 * grid.extent[1];
    config.vortices.push_back({cx - 0.5 * cfg.distance, cy, +1});
    config.vortices.push_back({cx + 0.5 * cfg.distance, cy, -1});
  }
  return config;
}

// node-grid fields want singularities off-node (cell centers)
VortexConfig dipole_from_config(const ExperimentConfig& cfg,
                                const GridSpec& grid) {
  VortexConfig config = raw_dipole(cfg, grid);
  for (Vortex& v : config.vortices) v = snap_to_cell_center(grid, v);
  return config;
}

// shift-field wall problems sample angles at cell centers, so the
// singularities belong on lattice vertices
VortexConfig wall_dipole_from_config(const ExperimentConfig& cfg,
                                     const GridSpec& grid) {
  VortexConfig config = raw_dipole(cfg, grid);
  for (Vortex& v : config.vortices) {
    v.x = std::round(v.x / grid.h(0)) * grid.h(0);
    v.y = std::round(v.y / grid.h(1)) * grid.h(1);
  }
  return config;
}

// ---- kinds -----------------------------------------------------------------

RunReport run_g_table(const ExperimentConfig& cfg) {
  Emitter io(cfg);
  EnergyParams params = cfg.params;
  params.eta = cfg.eta_rel;
  params.validate();
  if (cfg.samples < 2) throw ConfigError("g_table needs samples >= 2");

  const JumpCost jc = JumpCost::build(params, cfg.z_max, cfg.samples);
  {
    auto out = io.open_csv("g_table.csv", "z,g,t_star");
    for (const GSample& s : jc.samples())
      out << fmt(s.z) << "," << fmt(s.g) << "," << fmt(s.t_star) << "\n";
  }
  PlotSeries gs{"g(z)", {}, {}};
  PlotSeries ts{"t*(z)", {}, {}};
  for (const GSample& s : jc.samples()) {
    gs.x.push_back(s.z);
    gs.y.push_back(s.g);
    ts.x.push_back(s.z);
    ts.y.push_back(s.t_star);
  }
  write_svg_lineplot(io.path_of("g_table.svg"), "truncated jump cost", "z",
                     "g", {gs, ts});
  io.note_file("g_table.svg");

  std::map<std::string, double> numbers;
  double g2 = std::numeric_limits<double>::quiet_NaN();
  for (const GSample& s : jc.samples())
    if (std::fabs(s.z - 2.0) < 1e-12) g2 = s.g;
  if (std::isnan(g2)) g2 = eval_g(params, 2.0).value;
  numbers["g_z2"] = g2;
  numbers["two_cw0"] = jc.two_cw0();
  numbers["sup_g"] = jc.samples().back().g;
  write_summary_csv(io, numbers);
  return io.finish(std::move(numbers));
}

RunReport run_gamma_1d_step(const ExperimentConfig& cfg) {
  Emitter io(cfg);
  cfg.schedule.validate();
  if (!(cfg.delta > 0.0 && cfg.delta <= kPi))
    throw DomainError("step delta must lie in (0, pi]");

  const double extent = cfg.grid.extent[0];
  std::vector<double> eps_list;
  std::vector<EnergyBreakdown> points;
  std::vector<TracePoint> all_trace;
  double grad_check_max = 0.0;

  for (const double eps : cfg.schedule.epsilons) {
    const GridSpec grid =
        grid_for_epsilon(extent, 0.0, 1, eps, cfg.cells_per_eps);
    EnergyParams params = cfg.params;
    params.eta = cfg.eta_rel * grid.diameter();
    params.epsilon = eps;

    MinimizeOptions opts;
    opts.pinned = boundary_pin_mask(grid);
    opts.max_u_iters = 2000;
    opts.tol_step = cfg.schedule.tol_step;

    Schedule single{{eps},
                    cfg.schedule.max_outer_iters,
                    cfg.schedule.tol_energy,
                    cfg.schedule.tol_step};

    MinimizeResult res;
    if (cfg.mode == MinimizeMode::lifting) {
      AngleField init{grid, std::vector<double>(grid.nodes(), 0.0)};
      for (std::size_t i = 0; i < grid.res[0]; ++i)
        init.values[i] = grid.node_x(i) < 0.5 * extent ? 0.0 : cfg.delta;
      res = alternate_minimize(init, params, single, opts);
      grad_check_max = std::max(
          grad_check_max, gradient_fd_check(res.phi, res.v, params, grid, 10,
                                            cfg.seed, opts.pinned));
    } else {
      CircleField init = make_step_map(grid, cfg.delta);
      res = alternate_minimize(init, params, single, opts);
      grad_check_max = std::max(
          grad_check_max, gradient_fd_check(res.u, res.v, params, grid, 10,
                                            cfg.seed, opts.pinned));
    }
    eps_list.push_back(eps);
    points.push_back(res.energy);
    all_trace.insert(all_trace.end(), res.trace.begin(), res.trace.end());
  }

  write_curve_csv(io, "curve.csv", eps_list, points);
  write_trace_csv(io, all_trace);

  EnergyParams gp = cfg.params;
  gp.eta = cfg.eta_rel;
  const double target_arc = eval_g(gp, cfg.delta).value;
  const double target_chord = eval_g(gp, 2.0 * std::sin(0.5 * cfg.delta)).value;

  std::vector<double> totals;
  for (const auto& p : points) totals.push_back(p.total);
  const auto extrap = richardson_extrapolate(eps_list, totals);

  std::map<std::string, double> numbers;
  numbers["extrapolated"] =
      extrap ? *extrap : std::numeric_limits<double>::quiet_NaN();
  numbers["target_arc"] = target_arc;
  numbers["target_chord"] = target_chord;
  if (extrap)
    numbers["rel_err_arc"] = std::fabs(*extrap - target_arc) / target_arc;
  numbers["monotone_ok"] = trace_monotone(all_trace, 1e-6) ? 1.0 : 0.0;
  numbers["grad_check_max"] = grad_check_max;
  write_summary_csv(io, numbers);

  PlotSeries measured{"minimized total", eps_list, totals};
  PlotSeries target{"limit target",
                    {eps_list.front(), eps_list.back()},
                    {target_arc, target_arc}};
  write_svg_lineplot(io.path_of("energy_vs_eps.svg"),
                     "1-D step energy vs epsilon", "epsilon", "energy",
                     {measured, target}, true);
  io.note_file("energy_vs_eps.svg");
  return io.finish(std::move(numbers));
}

RunReport run_mm_profile(const ExperimentConfig& cfg) {
  Emitter io(cfg);
  cfg.schedule.validate();
  EnergyParams params = cfg.params;
  params.eta = cfg.eta_rel;
  params.validate();

  const double target = 2.0 * eval_cW(params, cfg.t_anchor);
  std::vector<double> eps_list, costs;
  double max_rel_err = 0.0;
  bool coarea_ok = true;
  MmProfileResult last;
  for (const double eps : cfg.schedule.epsilons) {
    std::size_t nodes = static_cast<std::size_t>(
        std::ceil(2.0 * cfg.half_width * 8.0 / eps)) + 1;
    nodes = std::min<std::size_t>(nodes, 400001);
    last = mm_profile_1d(cfg.t_anchor, eps, params, cfg.half_width, nodes);
    eps_list.push_back(eps);
    costs.push_back(last.cost);
    if (target > 0.0)
      max_rel_err = std::max(max_rel_err,
                             std::fabs(last.cost - target) / target);
    if (last.cost < target - 1e-6 * std::max(1.0, target)) coarea_ok = false;
  }
  {
    auto out = io.open_csv("costs.csv", "epsilon,cost,target");
    for (std::size_t i = 0; i < eps_list.size(); ++i)
      out << fmt(eps_list[i]) << "," << fmt(costs[i]) << "," << fmt(target)
          << "\n";
  }
  write_values_csv(io.path_of("profile.csv"), "v", last.profile.values);
  io.note_file("profile.csv");
  {
    PlotSeries prof{"v", {}, {}};
    const GridSpec& g = last.profile.grid;
    for (std::size_t i = 0; i < g.res[0]; ++i) {
      prof.x.push_back(g.node_x(i));
      prof.y.push_back(last.profile.values[i]);
    }
    write_svg_lineplot(io.path_of("profile.svg"), "transition profile", "x",
                       "v", {prof});
    io.note_file("profile.svg");
  }

  std::map<std::string, double> numbers;
  numbers["cost_finest"] = costs.back();
  numbers["target"] = target;
  numbers["rel_err_finest"] =
      target > 0.0 ? std::fabs(costs.back() - target) / target : 0.0;
  numbers["max_rel_err"] = max_rel_err;
  numbers["coarea_ok"] = coarea_ok ? 1.0 : 0.0;
  write_summary_csv(io, numbers);
  return io.finish(std::move(numbers));
}

struct ModeRun {
  std::vector<double> eps;
  std::vector<EnergyBreakdown> points;
  std::vector<TracePoint> trace;
  double grad_check = 0.0;
};

RunReport run_dichotomy(const ExperimentConfig& cfg) {
  Emitter io(cfg);
  cfg.schedule.validate();
  const double lx = cfg.grid.extent[0], ly = cfg.grid.extent[1];

  ModeRun direct_run, lifting_run;
  VortexConfig finest_dipole;

  for (const double eps : cfg.schedule.epsilons) {
    const GridSpec grid = grid_for_epsilon(lx, ly, 2, eps, cfg.cells_per_eps);
    EnergyParams params = cfg.params;
    params.eta = cfg.eta_rel * grid.diameter();
    params.epsilon = eps;

    MinimizeOptions opts;
    opts.pinned = boundary_pin_mask(grid);
    opts.tol_step = cfg.schedule.tol_step;

    Schedule single{{eps},
                    cfg.schedule.max_outer_iters,
                    cfg.schedule.tol_energy,
                    cfg.schedule.tol_step};

    AngleField phi0{grid, std::vector<double>(grid.nodes(), 0.0)};
    CircleField u0{grid, std::vector<double>(grid.nodes(), 0.0)};
    if (cfg.datum == "dipole") {
      const VortexConfig config = dipole_from_config(cfg, grid);
      finest_dipole = config;
      phi0 = dipole_angle_unwrapped(grid, config);
      u0 = make_dipole_map(grid, config);
      // freeze the datum on a small disk around each core, identically in
      // both modes: descent would otherwise drift the defects together
      // and the energies would compare different limit maps
      const double r_pin = 2.0 * std::max(grid.h(0), grid.h(1));
      for (std::size_t j = 0; j < grid.res[1]; ++j)
        for (std::size_t i = 0; i < grid.res[0]; ++i)
          for (const Vortex& vx : config.vortices)
            if (std::hypot(grid.node_x(i) - vx.x, grid.node_y(j) - vx.y) <=
                r_pin)
              opts.pinned[grid.node_index(i, j)] = 1;
    } else if (cfg.datum == "smooth") {
      for (std::size_t j = 0; j < grid.res[1]; ++j)
        for (std::size_t i = 0; i < grid.res[0]; ++i) {
          const double val = cfg.amplitude *
                             std::sin(kPi * grid.node_x(i) / lx) *
                             std::sin(kPi * grid.node_y(j) / ly);
          phi0.values[grid.node_index(i, j)] = val;
          u0.theta[grid.node_index(i, j)] = wrap_2pi(val);
        }
    } else if (cfg.datum == "step2d") {
      u0 = make_step_map(grid, cfg.delta);
      for (std::size_t j = 0; j < grid.res[1]; ++j)
        for (std::size_t i = 0; i < grid.res[0]; ++i)
          phi0.values[grid.node_index(i, j)] =
              grid.node_x(i) < 0.5 * lx ? 0.0 : cfg.delta;
    } else {
      throw ConfigError("unknown dichotomy datum: " + cfg.datum);
    }

    MinimizeResult rl = alternate_minimize(phi0, params, single, opts);
    MinimizeResult rd = alternate_minimize(u0, params, single, opts);

    lifting_run.eps.push_back(eps);
    lifting_run.points.push_back(rl.energy);
    lifting_run.trace.insert(lifting_run.trace.end(), rl.trace.begin(),
                             rl.trace.end());
    lifting_run.grad_check = std::max(
        lifting_run.grad_check, gradient_fd_check(rl.phi, rl.v, params, grid,
                                                  10, cfg.seed, opts.pinned));
    direct_run.eps.push_back(eps);
    direct_run.points.push_back(rd.energy);
    direct_run.trace.insert(direct_run.trace.end(), rd.trace.begin(),
                            rd.trace.end());
    direct_run.grad_check = std::max(
        direct_run.grad_check, gradient_fd_check(rd.u, rd.v, params, grid, 10,
                                                 cfg.seed, opts.pinned));
  }

  write_curve_csv(io, "lifting_curve.csv", lifting_run.eps,
                  lifting_run.points);
  write_curve_csv(io, "direct_curve.csv", direct_run.eps, direct_run.points);
  {
    auto out = io.open_csv("dichotomy.csv",
                           "epsilon,direct_total,lifting_total,gap");
    for (std::size_t i = 0; i < direct_run.eps.size(); ++i)
      out << fmt(direct_run.eps[i]) << "," << fmt(direct_run.points[i].total)
          << "," << fmt(lifting_run.points[i].total) << ","
          << fmt(lifting_run.points[i].total - direct_run.points[i].total)
          << "\n";
  }
  {
    std::vector<TracePoint> both = lifting_run.trace;
    both.insert(both.end(), direct_run.trace.begin(), direct_run.trace.end());
    write_trace_csv(io, both);
  }

  std::vector<double> lt, dt;
  for (const auto& p : lifting_run.points) lt.push_back(p.total);
  for (const auto& p : direct_run.points) dt.push_back(p.total);
  const auto lext = richardson_extrapolate(lifting_run.eps, lt);
  const auto dext = richardson_extrapolate(direct_run.eps, dt);

  std::map<std::string, double> numbers;
  numbers["lifting_extrapolated"] = lext ? *lext : NAN;
  numbers["direct_extrapolated"] = dext ? *dext : NAN;
  const double gap = (lext && dext) ? *lext - *dext : NAN;
  numbers["gap_extrapolated"] = gap;

  bool sign_ok = true;
  for (std::size_t i = 0; i < lt.size(); ++i)
    if (lt[i] - dt[i] < -1e-9) sign_ok = false;
  numbers["sign_ok"] = sign_ok ? 1.0 : 0.0;
  numbers["monotone_ok"] =
      (trace_monotone(lifting_run.trace, 1e-6) &&
       trace_monotone(direct_run.trace, 1e-6))
          ? 1.0
          : 0.0;
  numbers["grad_check_max"] =
      std::max(lifting_run.grad_check, direct_run.grad_check);

  EnergyParams gp = cfg.params;
  gp.eta = cfg.eta_rel;
  if (cfg.datum == "dipole") {
    const double d = std::hypot(
        finest_dipole.vortices[0].x - finest_dipole.vortices[1].x,
        finest_dipole.vortices[0].y - finest_dipole.vortices[1].y);
    const double target = eval_g(gp, kTwoPi).value * d;
    numbers["target_gap"] = target;
    numbers["gap_rel_err"] = std::fabs(gap - target) / target;

    // shift-field wall value and the matching transport estimate
    const GridSpec wall_grid =
        GridSpec::box(lx, ly, cfg.wall_cells + 1, cfg.wall_cells + 1);
    VortexConfig wall_cfg = wall_dipole_from_config(cfg, wall_grid);
    CellField base{wall_grid, std::vector<double>(wall_grid.cells())};
    for (std::size_t j = 0; j < wall_grid.cells_y(); ++j)
      for (std::size_t i = 0; i < wall_grid.cells_x(); ++i) {
        double phi = 0.0;
        for (const Vortex& v : wall_cfg.vortices)
          phi += v.charge * std::atan2(cell_center_y(wall_grid, j) - v.y,
                                       cell_center_x(wall_grid, i) - v.x);
        base.cell(i, j) = wrap_2pi(phi);
      }
    const JumpCost jc = JumpCost::build(
        gp, kTwoPi * (2.0 * cfg.label_bound + 2.0), 4096);
    LiftingProblem wall = LiftingProblem::build(
        std::move(base), jc, std::max(1, cfg.label_bound),
        JumpConvention::raw, kPi);
    const LiftingSolution sol =
        mg_local_search(wall, cfg.seed, std::max<std::size_t>(2, cfg.restarts));
    numbers["mg_wall"] = sol.objective;
    numbers["transport_estimate"] = dipole_transport_estimate(wall_cfg, jc);
  } else if (cfg.datum == "smooth") {
    numbers["target_gap"] = 0.0;
    numbers["gap_rel_err"] = std::fabs(gap);
  } else if (cfg.datum == "step2d") {
    const double g_chord =
        eval_g(gp, 2.0 * std::sin(0.5 * cfg.delta)).value * ly;
    const double g_arc = eval_g(gp, cfg.delta).value * ly;
    numbers["g_chord"] = g_chord;
    numbers["g_arc"] = g_arc;
    if (dext)
      numbers["direct_closer_to_arc"] =
          std::fabs(*dext - g_arc) < std::fabs(*dext - g_chord) ? 1.0 : 0.0;
  }
  write_summary_csv(io, numbers);

  PlotSeries sl{"lifting", lifting_run.eps, lt};
  PlotSeries sd{"direct", direct_run.eps, dt};
  write_svg_lineplot(io.path_of("energy_vs_eps.svg"),
                     "dichotomy: minimized energies", "epsilon", "energy",
                     {sl, sd}, true);
  io.note_file("energy_vs_eps.svg");
  return io.finish(std::move(numbers));
}

RunReport run_mg_solve(const ExperimentConfig& cfg) {
  Emitter io(cfg);
  const std::size_t ncx = cfg.cells[0];
  const std::size_t ncy = cfg.cells[1];
  const GridSpec grid =
      ncy == 0 ? GridSpec::line(cfg.grid.extent[0], ncx + 1)
               : GridSpec::box(cfg.grid.extent[0], cfg.grid.extent[1],
                               ncx + 1, ncy + 1);

  CellField base = CellField::constant(grid, 0.0);
  if (cfg.base == "step") {
    const double mid = 0.5 * grid.extent[0];
    for (std::size_t j = 0; j < grid.cells_y(); ++j)
      for (std::size_t i = 0; i < grid.cells_x(); ++i)
        base.values[grid.dim == 1 ? i : grid.cell_index(i, j)] =
            cell_center_x(grid, i) < mid ? 0.0 : wrap_2pi(cfg.delta);
  } else if (cfg.base == "dipole") {
    const VortexConfig config = dipole_from_config(cfg, grid);
    for (std::size_t j = 0; j < grid.cells_y(); ++j)
      for (std::size_t i = 0; i < grid.cells_x(); ++i) {
        double phi = 0.0;
        for (const Vortex& v : config.vortices)
          phi += v.charge * std::atan2(cell_center_y(grid, j) - v.y,
                                       cell_center_x(grid, i) - v.x);
        base.cell(i, j) = wrap_2pi(phi);
      }
  } else if (cfg.base == "vortex_core") {
    base = vortex_cell_field(grid, 0.5 * grid.extent[0],
                             0.5 * grid.extent[1]);
  } else if (cfg.base == "random") {
    std::mt19937_64 rng(cfg.seed);
    for (double& v : base.values)
      v = kTwoPi * static_cast<double>(rng() >> 11) / 9007199254740992.0;
  } else {
    throw ConfigError("unknown mg_solve base: " + cfg.base);
  }

  EnergyParams gp = cfg.params;
  gp.eta = cfg.eta_rel;
  const JumpCost jc = JumpCost::build(
      gp, kTwoPi * (2.0 * cfg.label_bound + 2.0), 4096);
  const LiftingProblem problem = LiftingProblem::build(
      base, jc, cfg.label_bound, cfg.convention, cfg.sigma);

  const double states = std::pow(2.0 * cfg.label_bound + 1.0,
                                 static_cast<double>(grid.cells()));
  LiftingSolution sol;
  if (cfg.solver == "bruteforce" ||
      (cfg.solver == "auto" && states <= 1e7)) {
    sol = mg_bruteforce(problem);
  } else if (cfg.solver == "local_search" || cfg.solver == "auto") {
    sol = mg_local_search(problem, cfg.seed, cfg.restarts);
  } else {
    throw ConfigError("unknown solver: " + cfg.solver);
  }

  {
    auto out = io.open_csv("solution.csv", "cell,base_angle,k");
    for (std::size_t c = 0; c < problem.base.values.size(); ++c)
      out << c << "," << fmt(problem.base.values[c]) << "," << sol.k[c]
          << "\n";
  }
  std::map<std::string, double> numbers;
  numbers["objective"] = sol.objective;
  numbers["exhaustive"] = sol.optimality_tag == "exhaustive" ? 1.0 : 0.0;
  numbers["cells"] = static_cast<double>(grid.cells());
  numbers["label_bound"] = cfg.label_bound;
  write_summary_csv(io, numbers);
  return io.finish(std::move(numbers));
}

RunReport run_transport_compare(const ExperimentConfig& cfg) {
  Emitter io(cfg);
  const GridSpec wall_grid = GridSpec::box(
      cfg.grid.extent[0], cfg.grid.extent[1], cfg.wall_cells + 1,
      cfg.wall_cells + 1);
  const VortexConfig config = wall_dipole_from_config(cfg, wall_grid);

  EnergyParams gp = cfg.params;
  gp.eta = cfg.eta_rel;
  const JumpCost jc = JumpCost::build(gp, kTwoPi * 4.0, 4096);

  const double transport = dipole_transport_estimate(config, jc);

  CellField base{wall_grid, std::vector<double>(wall_grid.cells())};
  for (std::size_t j = 0; j < wall_grid.cells_y(); ++j)
    for (std::size_t i = 0; i < wall_grid.cells_x(); ++i) {
      double phi = 0.0;
      for (const Vortex& v : config.vortices)
        phi += v.charge * std::atan2(cell_center_y(wall_grid, j) - v.y,
                                     cell_center_x(wall_grid, i) - v.x);
      base.cell(i, j) = wrap_2pi(phi);
    }
  const LiftingProblem wall = LiftingProblem::build(
      std::move(base), jc, std::max(1, cfg.label_bound), JumpConvention::raw,
      kPi);
  const LiftingSolution sol =
      mg_local_search(wall, cfg.seed, std::max<std::size_t>(2, cfg.restarts));

  std::map<std::string, double> numbers;
  numbers["transport_estimate"] = transport;
  numbers["mg_wall"] = sol.objective;
  if (config.vortices.size() == 2) {
    const double d = std::hypot(config.vortices[0].x - config.vortices[1].x,
                                config.vortices[0].y - config.vortices[1].y);
    numbers["g2pi_distance"] = eval_g(gp, kTwoPi).value * d;
  }
  numbers["wall_vs_transport_rel"] =
      transport > 0.0 ? std::fabs(sol.objective - transport) / transport : 0.0;
  write_summary_csv(io, numbers);
  return io.finish(std::move(numbers));
}

} // namespace

RunReport run_experiment(const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::g_table:
      return run_g_table(config);
    case ExperimentKind::gamma_1d_step:
      return run_gamma_1d_step(config);
    case ExperimentKind::mm_profile:
      return run_mm_profile(config);
    case ExperimentKind::dichotomy_dipole:
      return run_dichotomy(config);
    case ExperimentKind::mg_solve:
      return run_mg_solve(config);
    case ExperimentKind::transport_compare:
      return run_transport_compare(config);
  }
  throw ConfigError("unhandled experiment kind");
}

std::vector<RunReport> run_config_file(
    const std::string& path, const std::string& out_override,
    std::optional<std::uint64_t> seed_override, int jobs) {
  std::vector<ExperimentConfig> configs = parse_config_file(path);
  for (ExperimentConfig& c : configs) {
    if (!out_override.empty()) c.out_dir = out_override;
    if (seed_override) c.seed = *seed_override;
  }
  std::vector<RunReport> reports(configs.size());
  if (jobs <= 1 || configs.size() <= 1) {
    for (std::size_t i = 0; i < configs.size(); ++i)
      reports[i] = run_experiment(configs[i]);
    return reports;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  std::mutex err_mutex;
  std::exception_ptr first_error;
  const std::size_t nworkers =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), configs.size());
  for (std::size_t w = 0; w < nworkers; ++w)
    workers.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= configs.size()) return;
        try {
          reports[i] = run_experiment(configs[i]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (std::thread& t : workers) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return reports;
}

} // namespace atlift
