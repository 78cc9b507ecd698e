// Command-line front end: run, validate and list scenarios.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "eitq/errors.hpp"
#include "eitq/runner.hpp"
#include "eitq/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

fs::path scenario_dir() {
  if (const char* env = std::getenv("EITQ_SCENARIO_DIR")) return env;
  return EITQ_SCENARIO_DIR;
}

std::vector<fs::path> bundled() {
  std::vector<fs::path> out;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(scenario_dir(), ec)) {
    if (e.path().extension() == ".yaml") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// A bare name such as "fig3_cv_sweep" refers to a bundled scenario.
fs::path resolve(const std::string& arg) {
  if (fs::exists(arg)) return arg;
  const fs::path candidate = scenario_dir() / (arg + ".yaml");
  if (fs::exists(candidate)) return candidate;
  throw eitq::ConfigError("", 0, "no scenario file or bundled scenario named '" + arg + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EIT quantum delay-line simulator"};
  app.require_subcommand(1);

  std::string file;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Run a scenario and write its tables and manifest");
  run->add_option("scenario", file, "Scenario file or bundled scenario name")->required();
  run->add_option("--out", out_dir, "Output directory (overrides outputs.dir)");
  run->add_option("--seed", seed, "Seed (overrides the scenario's seed)");
  run->add_option("--trials", trials, "Monte-Carlo trials (overrides monte_carlo.trials)");
  run->add_flag("--quiet", quiet, "Suppress progress output");

  auto* validate = app.add_subcommand("validate", "Parse and validate a scenario without running it");
  validate->add_option("scenario", file, "Scenario file or bundled scenario name")->required();

  auto* list = app.add_subcommand("list-scenarios", "List bundled scenarios");

  CLI11_PARSE(app, argc, argv);

  if (list->parsed()) {
    for (const auto& p : bundled()) {
      std::string description;
      try {
        description = eitq::load_scenario(p).description;
      } catch (const std::exception& e) {
        description = std::string("(invalid: ") + e.what() + ")";
      }
      std::cout << p.stem().string() << "\t" << description << "\n";
    }
    return kExitOk;
  }

  eitq::Scenario scenario;
  try {
    scenario = eitq::load_scenario(resolve(file));
    if (seed) scenario.seed = *seed;
    if (trials) scenario.monte_carlo.trials = *trials;
    if (out_dir) scenario.outputs.dir = *out_dir;
    scenario.validate();
  } catch (const eitq::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const eitq::IoError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }

  if (validate->parsed()) {
    if (!quiet) std::cout << "ok: " << scenario.name << " (" << eitq::to_string(scenario.kind) << ")\n";
    return kExitOk;
  }

  try {
    const fs::path dir = scenario.outputs.dir;
    eitq::check_output_dir(dir);
    eitq::Logger log;
    if (!quiet) log = [](const std::string& m) { std::cerr << m << "\n"; };
    const eitq::RunResult result = eitq::run_scenario(scenario, log);
    const auto files = eitq::emit_tables(result, dir);
    if (!quiet) {
      for (const auto& f : files) std::cout << (dir / f).string() << "\n";
    }
  } catch (const eitq::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
