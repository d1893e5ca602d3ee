#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include <bearing_forms/errors.hpp>

#include "commands.hpp"

namespace {

int default_jobs() {
  if (const char* env = std::getenv("BEARING_FORMS_JOBS")) {
    const int jobs = std::atoi(env);
    if (jobs > 0) return jobs;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

int main(int argc, char** argv) {
  using namespace bearing_forms;
  using namespace bearing_forms::cli;

  CLI::App app{"bearing-forms: persistence-of-excitation analysis and bearing formation control"};
  app.require_subcommand(1);

  std::string scenario_ref;
  std::string out_dir = "./out";
  RunOverrides overrides;
  bool force = false;
  int stride = 1;
  double dt_value = 0.0, horizon_value = 0.0;
  std::uint64_t seed_value = 0;

  auto* analyze = app.add_subcommand("analyze", "connectivity, rank, and excitation report");
  analyze->add_option("scenario", scenario_ref, "scenario file or built-in name")->required();
  analyze->add_option("--out", out_dir, "output directory");

  auto* simulate = app.add_subcommand("simulate", "closed-loop run with CSV trace and SVG plots");
  simulate->add_option("scenario", scenario_ref, "scenario file or built-in name")->required();
  simulate->add_option("--out", out_dir, "output directory");
  auto* dt_opt = simulate->add_option("--dt", dt_value, "integrator step override");
  auto* horizon_opt = simulate->add_option("--horizon", horizon_value, "run length override");
  auto* seed_opt = simulate->add_option("--seed", seed_value, "perturbation seed override");
  simulate->add_flag("--force", force, "run even when the gain condition fails");
  simulate->add_option("--stride", stride, "keep every n-th trace row")
      ->check(CLI::PositiveNumber);

  auto* observe = app.add_subcommand("observe", "configuration observer against the scenario motion");
  observe->add_option("scenario", scenario_ref, "scenario file or built-in name")->required();
  observe->add_option("--out", out_dir, "output directory");
  auto* obs_dt = observe->add_option("--dt", dt_value, "integrator step override");
  auto* obs_horizon = observe->add_option("--horizon", horizon_value, "run length override");
  auto* obs_seed = observe->add_option("--seed", seed_value, "perturbation seed override");
  observe->add_option("--stride", stride, "keep every n-th trace row")->check(CLI::PositiveNumber);

  auto* scenarios = app.add_subcommand("scenarios", "list or export the built-in scenarios");
  auto* list = scenarios->add_subcommand("list", "names of the built-ins");
  std::string export_name;
  auto* export_cmd = scenarios->add_subcommand("export", "write a built-in scenario file to stdout");
  export_cmd->add_option("name", export_name, "built-in scenario name")->required();
  scenarios->require_subcommand(1);

  auto* sweep = app.add_subcommand("sweep", "batch runs over a parameter grid");
  sweep->add_option("scenario", scenario_ref, "scenario file or built-in name")->required();
  sweep->add_option("--out", out_dir, "output directory");
  std::vector<std::string> grid_specs;
  sweep->add_option("--set", grid_specs, "axis values, e.g. --set kd=8,10,12")
      ->take_all()
      ->expected(-1);
  int jobs = default_jobs();
  sweep->add_option("--jobs", jobs, "parallel runs (default: BEARING_FORMS_JOBS or cores)")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (dt_opt->count() || obs_dt->count()) overrides.dt = dt_value;
  if (horizon_opt->count() || obs_horizon->count()) overrides.horizon = horizon_value;
  if (seed_opt->count() || obs_seed->count()) overrides.seed = seed_value;

  try {
    if (analyze->parsed()) return cmd_analyze(scenario_ref, out_dir);
    if (simulate->parsed()) return cmd_simulate(scenario_ref, out_dir, overrides, force, stride);
    if (observe->parsed()) return cmd_observe(scenario_ref, out_dir, overrides, stride);
    if (scenarios->parsed()) {
      if (list->parsed()) return cmd_scenarios_list();
      return cmd_scenarios_export(export_name);
    }
    if (sweep->parsed()) return cmd_sweep(scenario_ref, out_dir, grid_specs, jobs);
  } catch (const ParseError& e) {
    std::cerr << scenario_ref << ":" << e.line() << ":" << e.column() << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const BearingLossError& e) {
    std::cerr << "bearing loss at t=" << e.time() << " on edge " << e.edge() << "\n";
    return kExitBearingLoss;
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::GainConditionViolated:
        std::cerr << e.what() << "\n";
        return kExitGainViolation;
      case ErrorKind::InvalidInput:
        std::cerr << e.what() << "\n";
        return kExitUsage;
      default:
        std::cerr << e.what() << "\n";
        return kExitFailure;
    }
  }
  return kExitUsage;
}
