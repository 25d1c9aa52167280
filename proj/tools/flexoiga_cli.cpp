#include "flexoiga/error.hpp"
#include "flexoiga/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace flexoiga;

namespace {

// A config file, a built-in name, or both (the file then patches the built-in).
ScenarioConfig load(const std::string& source, const std::string& scenario, const std::vector<std::string>& overrides) {
  require(!source.empty() || !scenario.empty(), ErrorKind::ConfigError, "give a config file or --scenario NAME");
  const bool is_file = !source.empty() && fs::is_regular_file(source);
  require(is_file || source.empty() || scenario.empty(), ErrorKind::ConfigError,
          "config file '" + source + "' not found");
  ScenarioConfig cfg = is_file ? ScenarioConfig::from_file(source, scenario)
                               : ScenarioConfig::builtin(scenario.empty() ? source : scenario);
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    require(eq != std::string::npos && eq > 0, ErrorKind::ConfigError, "override '" + kv + "' is not key=value");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError:
      return 2;
    case ErrorKind::SolverFailure:
      return 3;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-patch isogeometric solver for flexoelectric beams and lattices"};
  app.require_subcommand(1);

  std::string source;
  std::string scenario;
  std::vector<std::string> overrides;
  std::string out_dir = ".";
  bool vtk = false;
  int vtk_samples = 8;
  bool quiet = false;

  CLI::App* run = app.add_subcommand("run", "Run a built-in scenario or a JSON config file");
  run->add_option("config", source, "JSON config file (or a built-in scenario name)");
  run->add_option("--scenario", scenario, "Built-in scenario to run or to use as the config's base");
  run->add_option("--set", overrides, "Override a config entry, e.g. --set dg.tau=1e10");
  run->add_option("-o,--out", out_dir, "Output directory");
  run->add_flag("--vtk", vtk, "Write one VTK file per solve");
  run->add_option("--vtk-samples", vtk_samples, "VTK sampling density per patch")->check(CLI::PositiveNumber);
  run->add_flag("-q,--quiet", quiet, "Suppress progress output");

  CLI::App* list = app.add_subcommand("list", "List built-in scenarios");

  CLI::App* show = app.add_subcommand("show", "Print the effective config of a scenario");
  show->add_option("config", source, "JSON config file (or a built-in scenario name)");
  show->add_option("--scenario", scenario, "Built-in scenario");
  show->add_option("--set", overrides, "Override a config entry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*list) {
      for (const std::string& name : builtin_scenarios()) std::cout << name << '\n';
      return 0;
    }
    const ScenarioConfig cfg = load(source, scenario, overrides);
    if (*show) {
      std::cout << cfg.text() << '\n';
      return 0;
    }

    fs::create_directories(out_dir);
    RunObserver obs;
    if (vtk) {
      obs.on_solution = [&](const std::string& label, const MultiPatchMesh& mesh, const SolutionField& sol) {
        write_vtk(sol, mesh, (fs::path(out_dir) / (label + ".vtk")).string(), vtk_samples);
      };
    }
    if (!quiet) {
      obs.on_point = [](const std::string& label, double seconds) {
        std::fprintf(stderr, "%s done in %.2f s\n", label.c_str(), seconds);
      };
    }
    const ScenarioResult result = run_scenario(cfg, obs);
    const fs::path csv = fs::path(out_dir) / (result.name + ".csv");
    write_csv(result.table, csv.string());
    if (!result.profile.rows.empty()) {
      write_csv(result.profile, (fs::path(out_dir) / (result.name + "_profile.csv")).string());
    }
    if (!quiet) std::fprintf(stderr, "wrote %s\n", csv.string().c_str());
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
