#pragma once

#include <filesystem>
#include <string>

#include "wrisk/moments.hpp"
#include "wrisk/semgen.hpp"

namespace wrisk {

/// Sample CSV: header "x1,...,xp,y", one observation per row, full precision.
void write_sample_csv(const std::filesystem::path& path, const EnvironmentSample& sample);
EnvironmentSample read_sample_csv(const std::filesystem::path& path, std::string env_id = {});

/// Moments JSON: keys G (row-major), Z, g_Y, n (null for population moments).
void write_moments_json(const std::filesystem::path& path, const EnvironmentMoments& moments);
EnvironmentMoments read_moments_json(const std::filesystem::path& path);

/// Simulator spec JSON: keys p, k, B (list of row-major matrices), probs,
/// noise_cov, shift_covs, seed; optional noise_family ("gaussian" |
/// "uniform") and shift_means. Validates before returning.
SemSpec read_sem_spec_json(const std::filesystem::path& path);
void write_sem_spec_json(const std::filesystem::path& path, const SemSpec& spec);

/// FNV-1a 64-bit content hash, hex-encoded; used in run manifests.
std::string file_hash_hex(const std::filesystem::path& path);

}  // namespace wrisk
