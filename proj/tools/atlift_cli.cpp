#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "atlift/errors.hpp"
#include "atlift/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"phase-field energies and minimal liftings for circle-valued "
               "maps: experiment runner"};
  app.require_subcommand(0, 1);

  bool list_kinds = false;
  app.add_flag("--list-kinds", list_kinds, "list experiment kinds and exit");

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  CLI::App* run = app.add_subcommand("run", "run experiments from a config");
  run->add_option("config", config_path, "JSON config (object or array)")
      ->required();
  run->add_option("--out", out_dir, "output directory override");
  run->add_option("--seed", seed, "random seed override");
  run->add_option("--jobs", jobs, "max concurrent experiments")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  if (list_kinds) {
    for (const std::string& k : atlift::experiment_kind_names())
      std::printf("%s\n", k.c_str());
    return kExitOk;
  }
  if (!run->parsed()) {
    std::fprintf(stderr, "%s\n", app.help().c_str());
    return kExitConfig;
  }

  try {
    const auto reports =
        atlift::run_config_file(config_path, out_dir, seed, jobs);
    for (const auto& rep : reports) {
      std::printf("%s\n", rep.dir.c_str());
      for (const auto& [key, value] : rep.numbers)
        std::printf("  %s = %.12g\n", key.c_str(), value);
    }
    return kExitOk;
  } catch (const atlift::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const atlift::DomainError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const atlift::DimensionError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  }
}
