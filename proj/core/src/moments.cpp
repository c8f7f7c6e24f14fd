#include "wrisk/moments.hpp"

#include <stdexcept>

#include "wrisk/errors.hpp"

namespace wrisk {

EnvironmentMoments estimate_moments(const EnvironmentSample& sample) {
  const Eigen::Index n = sample.x.rows();
  const Eigen::Index p = sample.x.cols();
  if (n < 1 || p < 1) throw std::invalid_argument("estimate_moments: need n >= 1 and p >= 1");
  if (sample.y.size() != n) throw std::invalid_argument("estimate_moments: X rows and Y length differ");
  if (!sample.x.allFinite() || !sample.y.allFinite())
    throw NonFiniteInputError("estimate_moments: sample for environment '" + sample.env_id +
                              "' contains non-finite entries");

  EnvironmentMoments m;
  const double inv_n = 1.0 / static_cast<double>(n);
  m.gram = (sample.x.transpose() * sample.x) * inv_n;
  m.gram = ((m.gram + m.gram.transpose()) * 0.5).eval();
  m.cross = (sample.x.transpose() * sample.y) * inv_n;
  m.target_second_moment = sample.y.squaredNorm() * inv_n;
  m.sample_size = static_cast<std::int64_t>(n);

  // X^T X / n is PSD up to roundoff; clip float dust, reject anything worse.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(m.gram);
  const double min_eig = eigen.eigenvalues().minCoeff();
  if (min_eig < 0.0) {
    const double tol = 1e-10 * std::max(1.0, m.gram.trace() / static_cast<double>(p));
    if (min_eig < -tol)
      throw NonFiniteInputError("estimate_moments: Gram matrix not positive semi-definite");
    Eigen::VectorXd clipped = eigen.eigenvalues().cwiseMax(0.0);
    m.gram = eigen.eigenvectors() * clipped.asDiagonal() * eigen.eigenvectors().transpose();
    m.gram = ((m.gram + m.gram.transpose()) * 0.5).eval();
  }
  return m;
}

CombinedSystem combine_plusdelta(const Eigen::MatrixXd& gram_env, const Eigen::VectorXd& cross_env,
                                 const Eigen::MatrixXd& gram_obs, const Eigen::VectorXd& cross_obs,
                                 double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("combine_plusdelta: gamma must be >= 0");
  if (gram_env.rows() != gram_obs.rows() || cross_env.size() != cross_obs.size())
    throw std::invalid_argument("combine_plusdelta: dimension mismatch");
  CombinedSystem out;
  out.gram = (1.0 + gamma) * gram_env + (1.0 - gamma) * gram_obs;
  out.cross = (1.0 + gamma) * cross_env + (1.0 - gamma) * cross_obs;
  return out;
}

CombinedSystem combine_plusdelta(const EnvironmentMoments& env, const EnvironmentMoments& obs,
                                 double gamma) {
  return combine_plusdelta(env.gram, env.cross, obs.gram, obs.cross, gamma);
}

}  // namespace wrisk
