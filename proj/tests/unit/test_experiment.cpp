#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "atlift/errors.hpp"
#include "atlift/experiment.hpp"
#include "atlift/field_io.hpp"
#include "atlift/report.hpp"

using namespace atlift;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path tmp_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("atlift_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

} // namespace

TEST_CASE("sha1 known vectors") {
  CHECK(sha1_hex("") == "da39a3ee5e6b4b0d3255bfef95601890afd80709");
  CHECK(sha1_hex("abc") == "a9993e364706816aba3e25717850c26c9cd0d89d");
}

TEST_CASE("field snapshots round trip") {
  const fs::path dir = tmp_dir("io");
  const GridSpec g = GridSpec::box(1.0, 2.0, 5, 7);
  std::vector<double> values(g.nodes());
  for (std::size_t n = 0; n < values.size(); ++n)
    values[n] = std::sin(0.37 * static_cast<double>(n)) * 1e-3 + n;

  const std::string bin = (dir / "f.bin").string();
  write_field_bin(bin, g, values);
  const BinField back = read_field_bin(bin);
  CHECK(back.dim == 2);
  CHECK(back.res[0] == 5);
  CHECK(back.res[1] == 7);
  CHECK(back.values == values);

  const std::string csv = (dir / "f.csv").string();
  write_values_csv(csv, "value", values);
  const std::vector<double> vback = read_values_csv(csv);
  CHECK(vback == values);
}

TEST_CASE("richardson extrapolation recovers a linear model") {
  const std::vector<double> eps{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> vals;
  for (const double e : eps) vals.push_back(3.7 + 11.0 * e);
  const auto x = richardson_extrapolate(eps, vals);
  REQUIRE(x.has_value());
  CHECK(*x == doctest::Approx(3.7).epsilon(1e-12));
  CHECK_FALSE(richardson_extrapolate({0.1, 0.05}, {1.0, 2.0}).has_value());
}

TEST_CASE("config parsing and its error paths") {
  CHECK_THROWS_AS(parse_experiment_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config("{\"kind\": \"sorcery\"}"),
                  ConfigError);
  CHECK_THROWS_AS(parse_experiment_config("{\"kind\": 7}"), ConfigError);
  CHECK_THROWS_AS(
      parse_experiment_config(
          "{\"kind\": \"g_table\", \"scenario\": {\"z_max\": \"ten\"}}"),
      ConfigError);

  const ExperimentConfig c = parse_experiment_config(R"json({
    "kind": "gamma_1d_step",
    "params": {"psi": "quadratic", "f": "linear", "W": "quadratic_well"},
    "schedule": {"epsilons": [0.1, 0.05], "max_outer_iters": 12},
    "scenario": {"delta": 1.0, "mode": "lifting", "cells_per_eps": 4},
    "seed": 9
  })json");
  CHECK(c.kind == ExperimentKind::gamma_1d_step);
  CHECK(c.schedule.epsilons.size() == 2);
  CHECK(c.schedule.max_outer_iters == 12);
  CHECK(c.delta == doctest::Approx(1.0));
  CHECK(c.seed == 9);
  CHECK(parse_experiment_kind("mg_solve") == ExperimentKind::mg_solve);
  CHECK(experiment_kind_names().size() == 6);
}

TEST_CASE("g_table experiment: outputs, manifest, determinism") {
  const fs::path dir = tmp_dir("gtable");
  ExperimentConfig cfg = parse_experiment_config(R"json({
    "kind": "g_table",
    "scenario": {"z_max": 10.0, "samples": 201},
    "seed": 4
  })json");
  cfg.out_dir = (dir / "a").string();
  const RunReport rep = run_experiment(cfg);
  CHECK(std::fabs(rep.numbers.at("g_z2") - 1.0) < 1e-4);

  // manifest lists every emitted file with its correct content hash
  const std::string manifest = slurp(rep.dir + "/run_manifest.json");
  for (const std::string& f : rep.files) {
    if (f == "run_manifest.json") continue;
    CHECK(manifest.find("\"" + f + "\"") != std::string::npos);
    CHECK(manifest.find(sha1_file(rep.dir + "/" + f)) != std::string::npos);
  }

  // identical config + seed: byte-identical CSVs
  ExperimentConfig cfg2 = cfg;
  cfg2.out_dir = (dir / "b").string();
  const RunReport rep2 = run_experiment(cfg2);
  CHECK(slurp(rep.dir + "/g_table.csv") == slurp(rep2.dir + "/g_table.csv"));
  CHECK(slurp(rep.dir + "/summary.csv") == slurp(rep2.dir + "/summary.csv"));
}

TEST_CASE("mg_solve experiment on a small step instance") {
  const fs::path dir = tmp_dir("mgsolve");
  ExperimentConfig cfg = parse_experiment_config(R"json({
    "kind": "mg_solve",
    "scenario": {"base": "step", "cells": [8], "delta": 1.5707963267948966,
                 "label_bound": 2, "solver": "auto"}
  })json");
  cfg.out_dir = dir.string();
  const RunReport rep = run_experiment(cfg);
  CHECK(rep.numbers.at("exhaustive") == 1.0);
  CHECK(rep.numbers.at("objective") ==
        doctest::Approx(2.0 * kPi / (kPi + 4.0)).epsilon(1e-4));
  CHECK(fs::exists(fs::path(rep.dir) / "solution.csv"));
}

TEST_CASE("transport_compare experiment ties the estimators together") {
  const fs::path dir = tmp_dir("transport");
  ExperimentConfig cfg = parse_experiment_config(R"json({
    "kind": "transport_compare",
    "scenario": {"distance": 0.5, "wall_cells": 32, "label_bound": 1,
                 "restarts": 4}
  })json");
  cfg.out_dir = dir.string();
  const RunReport rep = run_experiment(cfg);
  CHECK(rep.numbers.at("transport_estimate") ==
        doctest::Approx(kPi / (kPi + 1.0)).epsilon(1e-6));
  CHECK(rep.numbers.at("wall_vs_transport_rel") <= 0.08);
}

TEST_CASE("batch config files run every entry") {
  const fs::path dir = tmp_dir("batch");
  const fs::path cfg_path = dir / "batch.json";
  {
    std::ofstream out(cfg_path);
    out << R"json([
      {"kind": "g_table", "scenario": {"z_max": 6.0, "samples": 61}},
      {"kind": "mg_solve",
       "scenario": {"base": "vortex_core", "cells": [2, 2],
                    "label_bound": 2}}
    ])json";
  }
  const auto reports =
      run_config_file(cfg_path.string(), (dir / "out").string(), 11, 2);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].numbers.count("g_z2") == 1);
  CHECK(reports[1].numbers.at("objective") > 0.0);
}
