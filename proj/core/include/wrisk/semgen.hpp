#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wrisk/moments.hpp"
#include "wrisk/rng.hpp"

namespace wrisk {

enum class NoiseFamily { kGaussian, kSymmetricUniform };

/// Random-coefficient structural equation system over the stacked vector
/// (Y, X): a finite mixture of transfer matrices B_l shared by all
/// environments, centered noise with covariance noise_cov, and one centered
/// shift per shifted environment. Every observation solves
/// (I - B) v = noise + shift and splits as Y = v[0], X = v[1:].
struct SemSpec {
  int covariate_dim = 0;  // p
  int num_shifted = 0;    // k
  std::vector<Eigen::MatrixXd> transfer;    // B_l, (p+1) x (p+1)
  std::vector<double> probabilities;        // mixture weights, sum to 1
  Eigen::MatrixXd noise_cov;                // (p+1) x (p+1), PSD
  std::vector<Eigen::MatrixXd> shift_covs;  // k PSD matrices, (p+1) x (p+1)
  /// Optional in spec files; validation rejects nonzero means because the
  /// noise-shift orthogonality assumption forces centered shifts.
  std::vector<Eigen::VectorXd> shift_means;
  NoiseFamily noise_family = NoiseFamily::kGaussian;
  std::uint64_t seed = 0;

  int system_dim() const { return covariate_dim + 1; }
  /// Throws SpecValidationError naming the offending field.
  void validate() const;
};

/// "O" for the observational environment, "A1".."Ak" for shifted ones.
std::string env_label(int env);

/// Per-observation internals, exposed for distributional diagnostics.
struct SemDraws {
  std::vector<int> regime;  // mixture index per observation
  Eigen::MatrixXd noise;    // n x (p+1)
  Eigen::MatrixXd shift;    // n x (p+1)
};

/// Draws n observations from environment `env` (0 = observational, i >= 1 =
/// shifted environment i). Each observation uses its own substream derived
/// from (seed, env, index), so output is identical regardless of evaluation
/// order or thread count.
EnvironmentSample sample_environment(const SemSpec& spec, int env, std::int64_t n,
                                     SemDraws* detail = nullptr);

/// Exact second moments of environment `env`: mixes T_l (noise_cov +
/// shift_cov) T_l^T over the transfer realizations, T_l = (I - B_l)^{-1}.
EnvironmentMoments population_moments(const SemSpec& spec, int env);

using VectorMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using NoiseSampler = std::function<Eigen::VectorXd(Rng&)>;

struct EmbeddingDraw {
  Eigen::MatrixXd transfer;             // fitted B for this observation
  Eigen::MatrixXd nonlinear_solutions;  // columns: solved nonlinear systems
  double roundtrip_error = 0.0;         // relative error of (I-B)^{-1} C vs solutions
};

struct EmbeddingResult {
  Eigen::MatrixXd canonical_inputs;  // C: columns e1, e1+e2, ..., e1+e_{p+1}
  std::vector<EmbeddingDraw> draws;
  std::int64_t rejected_singular = 0;
  double max_roundtrip_error = 0.0;
};

/// Represents up to p+1 nonlinear systems v = f(v + shift) + noise as one
/// random-coefficient linear system: per draw, solves each environment's
/// fixed point by damped iteration, stacks the solutions into D, and fits
/// B = I - C D^{-1} so that (I - B)^{-1} C = D reproduces every nonlinear
/// solution. Draws with singular D are resampled (counted); persistent
/// singularity raises SingularEmbeddingError and a diverging fixed point
/// raises FixedPointDivergenceError.
EmbeddingResult embed_nonlinear(const VectorMap& f, int system_dim,
                                const std::vector<Eigen::VectorXd>& shifts, const NoiseSampler& noise,
                                std::int64_t n, std::uint64_t seed);

}  // namespace wrisk
