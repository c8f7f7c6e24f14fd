#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>

namespace wrisk {

/// One environment's raw observations: row u of `x` pairs with `y[u]`.
struct EnvironmentSample {
  Eigen::MatrixXd x;   // n x p
  Eigen::VectorXd y;   // n
  std::string env_id;  // "O", "A1", ...
};

/// Second-moment reduction of an environment: E[X^T X], E[X Y], E[Y^2].
///
/// These summaries are the sole interface between data and estimation, so the
/// empirical and population paths share every formula downstream.
struct EnvironmentMoments {
  Eigen::MatrixXd gram;                     // symmetric PSD, p x p
  Eigen::VectorXd cross;                    // p
  double target_second_moment = 0.0;        // >= 0
  std::optional<std::int64_t> sample_size;  // nullopt marks population moments

  Eigen::Index dim() const { return cross.size(); }
};

/// Plug-in moments: gram = X^T X / n, cross = X^T Y / n, E[Y^2] = |Y|^2 / n.
/// Throws NonFiniteInputError when any entry is NaN or infinite.
EnvironmentMoments estimate_moments(const EnvironmentSample& sample);

struct CombinedSystem {
  Eigen::MatrixXd gram;
  Eigen::VectorXd cross;
};

/// (1+gamma)*env + (1-gamma)*obs for the Gram matrix and cross vector: the
/// linear system whose solution is the penalized-risk minimizer of one
/// shifted environment.
CombinedSystem combine_plusdelta(const EnvironmentMoments& env, const EnvironmentMoments& obs,
                                 double gamma);
CombinedSystem combine_plusdelta(const Eigen::MatrixXd& gram_env, const Eigen::VectorXd& cross_env,
                                 const Eigen::MatrixXd& gram_obs, const Eigen::VectorXd& cross_obs,
                                 double gamma);

}  // namespace wrisk
