#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "wrisk/risk.hpp"

namespace wrisk {

/// Lattice {-radius, -radius+step, ..., radius}^dim.
struct GridSpec {
  double radius = 1.0;
  double step = 0.01;
  int dim = 1;

  static constexpr double kMaxPoints = 1e8;

  std::int64_t points_per_axis() const;
  /// Throws GridGuardExceededError when the lattice exceeds kMaxPoints.
  void validate() const;
};

struct GridMinimum {
  Eigen::VectorXd argmin;
  double value = 0.0;
};

/// Exhaustive minimization of the worst-risk envelope on the lattice.
/// Evaluation is sharded across threads along the first coordinate with a
/// deterministic reduction, so ties resolve to the lexicographically first
/// lattice point regardless of thread count.
GridMinimum grid_minimize(const WorstRiskObjective& objective, const GridSpec& grid);

/// Monte-Carlo check of the worst-risk value from the weight-direction side:
/// max over unit vectors w of (1+tau) sum_i w_i^2 R_i(beta) - tau R_O(beta).
/// The axis directions e_1..e_k are always appended to the random draws,
/// which makes the maximum exact (the optimal direction is axis-aligned).
double sphere_max_risk(const WorstRiskObjective& objective, const Eigen::VectorXd& beta,
                       std::int64_t n_dirs, std::uint64_t seed);

/// Search radius from the coercivity of the penalized risks:
/// 2 * max_i (|z_i| + sqrt(|c_i|)) / lambda_min(G_i) over the h_i triples.
/// Infinite when some h_i Hessian is not positive definite.
double suggest_radius(const WorstRiskObjective& objective);

}  // namespace wrisk
