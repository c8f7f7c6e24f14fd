#include <CLI11.hpp>

#include <string>

#include "commands.hpp"

namespace {

void add_root_flags(CLI::App* cmd, std::string* root_mode, int* budget) {
  cmd->add_option("--root-mode", *root_mode, "Root refinement: exact | bisect")
      ->check(CLI::IsMember({"exact", "bisect"}))
      ->capture_default_str();
  cmd->add_option("--cn", *budget, "Bisections per bracket in bisect mode")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Worst-case out-of-sample risk minimization across shifted environments"};
  app.require_subcommand(1);

  wrisk::RunConfig config;
  std::string root_mode = "exact";
  std::uint64_t seed_value = 0;

  auto* simulate = app.add_subcommand("simulate", "Draw per-environment sample CSVs from a SEM spec");
  simulate->add_option("--spec", config.spec_path, "SEM spec JSON")->required();
  simulate->add_option("--out", config.output_path, "Output directory (default: cwd)");
  simulate->add_option("--n", config.sample_count, "Observations per environment")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  auto* seed_opt = simulate->add_option("--seed", seed_value, "Override the spec seed");
  simulate->add_flag("--population-moments", config.write_population_moments,
                     "Also export exact population moments per environment");

  auto* estimate = app.add_subcommand("estimate", "Estimate the worst-risk minimizer from data");
  estimate->add_option("--data", config.data_dir, "Directory with env_*.csv or moments_*.json")
      ->required();
  estimate->add_option("--gamma", config.gamma, "Shift-strength multiplier (>= 0)")
      ->capture_default_str();
  estimate->add_option("--out", config.output_path, "Report path (default: estimate_report.json)");
  add_root_flags(estimate, &root_mode, &config.bisection_budget);

  auto* sweep = app.add_subcommand("sweep", "Estimate along an ascending gamma grid");
  sweep->add_option("--data", config.data_dir, "Directory with env_*.csv or moments_*.json")->required();
  sweep->add_option("--gamma-grid", config.gamma_grid, "Ascending gamma values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--out", config.output_path, "CSV path (default: sweep.csv)");
  add_root_flags(sweep, &root_mode, &config.bisection_budget);

  auto* validate = app.add_subcommand("validate", "Convergence of estimates to the population minimizer");
  validate->add_option("--spec", config.spec_path, "SEM spec JSON")->required();
  validate->add_option("--gamma", config.gamma, "Shift-strength multiplier (>= 0)")
      ->capture_default_str();
  validate->add_option("--ladder", config.ladder, "Sample sizes, ascending")->delimiter(',');
  auto* vseed_opt = validate->add_option("--seed", seed_value, "Override the spec seed");
  validate->add_option("--out", config.output_path, "CSV path (default: validate.csv)");
  add_root_flags(validate, &root_mode, &config.bisection_budget);

  auto* oracle = app.add_subcommand("oracle-check", "Compare the estimator against the grid oracle");
  oracle->add_option("--data", config.data_dir, "Directory with env_*.csv or moments_*.json")
      ->required();
  oracle->add_option("--gamma", config.gamma, "Shift-strength multiplier (>= 0)")
      ->capture_default_str();
  oracle->add_option("--grid-step", config.grid_step, "Lattice step")->capture_default_str();
  oracle->add_option("--grid-radius", config.grid_radius, "Lattice radius (0 = derive)")
      ->capture_default_str();
  oracle->add_option("--out", config.output_path, "Optional JSON result path");
  add_root_flags(oracle, &root_mode, &config.bisection_budget);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? wrisk::kExitOk : wrisk::kExitConfig;
  }

  config.root_mode =
      root_mode == "bisect" ? wrisk::RootMode::kBudgetedBisection : wrisk::RootMode::kExactRefine;
  if (seed_opt->count() > 0 || vseed_opt->count() > 0) config.seed = seed_value;

  if (simulate->parsed()) return wrisk::cmd_simulate(config);
  if (estimate->parsed()) return wrisk::cmd_estimate(config);
  if (sweep->parsed()) return wrisk::cmd_sweep(config);
  if (validate->parsed()) return wrisk::cmd_validate(config);
  if (oracle->parsed()) return wrisk::cmd_oracle_check(config);
  return wrisk::kExitConfig;
}
