#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "atlift/energy.hpp"
#include "atlift/fields.hpp"
#include "atlift/functions.hpp"
#include "atlift/grid.hpp"
#include "atlift/lifting.hpp"
#include "atlift/minimize.hpp"

namespace atlift {

enum class ExperimentKind {
  g_table,
  gamma_1d_step,
  mm_profile,
  dichotomy_dipole,
  mg_solve,
  transport_compare,
};

const std::vector<std::string>& experiment_kind_names();
ExperimentKind parse_experiment_kind(const std::string& name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::g_table;
  std::string name; // output subdirectory; defaults to the kind name
  EnergyParams params;
  double eta_rel = 1e-6; // eta = eta_rel * grid diameter, resolved per grid
  GridSpec grid = GridSpec::line(1.0, 101);
  Schedule schedule{{0.1, 0.05, 0.025, 0.0125}, 40, 1e-6, 1e-8};
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  // scenario parameters (kind-specific subset is read)
  double delta = kPi / 2.0;
  MinimizeMode mode = MinimizeMode::lifting;
  std::string datum = "dipole"; // dichotomy: dipole | smooth | step2d
  double distance = 0.5;
  double amplitude = 0.8;       // smooth datum
  VortexConfig dipole;          // explicit positions override distance
  double t_anchor = 0.0;
  double half_width = 1.0;
  std::size_t cells_per_eps = 4;
  double z_max = 10.0;
  std::size_t samples = 201;
  std::string base = "step"; // mg_solve datum
  std::array<std::size_t, 2> cells{8, 8};
  int label_bound = 2;
  JumpConvention convention = JumpConvention::principal;
  double sigma = 0.0;
  std::string solver = "auto";
  std::size_t restarts = 8;
  std::size_t wall_cells = 48;
  JumpMetric metric = JumpMetric::arc;

  // Raw JSON echo of the config (for the manifest).
  std::string echo;
};

// Parses one experiment object. Throws ConfigError naming the offending
// field.
ExperimentConfig parse_experiment_config(const std::string& json_text);
// A config file holds one experiment object or an array of them.
std::vector<ExperimentConfig> parse_config_file(const std::string& path);

// Least-squares line fit in epsilon over the last three points; returns
// the intercept (the measured epsilon -> 0 limit).
std::optional<double> richardson_extrapolate(
    const std::vector<double>& epsilons, const std::vector<double>& values);

struct RunReport {
  ExperimentKind kind = ExperimentKind::g_table;
  std::string dir;
  std::map<std::string, double> numbers;
  std::vector<std::string> files; // paths relative to dir, manifest included
};

// Runs one experiment, writing CSVs, SVG plots, and run_manifest.json into
// <out_dir>/<name>/.
RunReport run_experiment(const ExperimentConfig& config);

// CLI entry: run every experiment in the file (concurrently up to `jobs`),
// honoring optional out/seed overrides.
std::vector<RunReport> run_config_file(const std::string& path,
                                       const std::string& out_override,
                                       std::optional<std::uint64_t> seed_override,
                                       int jobs);

} // namespace atlift
