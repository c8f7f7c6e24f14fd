#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "wrisk/roots.hpp"

namespace wrisk {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDegenerate = 3;
inline constexpr int kExitIo = 4;

inline constexpr int kReportFormatVersion = 1;

struct RunConfig {
  std::filesystem::path spec_path;
  std::filesystem::path data_dir;
  std::filesystem::path output_path;

  double gamma = 1.0;
  std::vector<double> gamma_grid;
  RootMode root_mode = RootMode::kExactRefine;
  int bisection_budget = 60;
  std::optional<std::uint64_t> seed;  // overrides the spec seed when set

  std::int64_t sample_count = 1000;            // simulate
  bool write_population_moments = false;       // simulate
  std::vector<std::int64_t> ladder = {100, 1000, 10000, 100000};  // validate

  double grid_step = 1e-3;   // oracle-check
  double grid_radius = 0.0;  // oracle-check; 0 = derive from the objective
};

/// Draws one CSV per environment plus a manifest with the seed and spec hash.
int cmd_simulate(const RunConfig& config);
/// Moments -> risks -> candidate enumeration; writes a JSON report.
int cmd_estimate(const RunConfig& config);
/// One estimate per gamma on a grid; writes a CSV path table.
int cmd_sweep(const RunConfig& config);
/// Population minimizer vs estimates over a sample-size ladder; writes CSV.
int cmd_validate(const RunConfig& config);
/// Compares the candidate estimator against the exhaustive grid oracle.
int cmd_oracle_check(const RunConfig& config);

}  // namespace wrisk
