#pragma once

#include <Eigen/Dense>

#include <vector>

#include "wrisk/moments.hpp"

namespace wrisk {

/// Quadratic risk R(beta) = beta^T G beta - 2 beta^T z + c.
struct QuadraticRisk {
  Eigen::MatrixXd gram;   // G
  Eigen::VectorXd cross;  // z
  double offset = 0.0;    // c = R(0)

  double operator()(const Eigen::VectorXd& beta) const;
  /// grad R(beta) = 2 (G beta - z).
  Eigen::VectorXd gradient(const Eigen::VectorXd& beta) const;
  Eigen::Index dim() const { return cross.size(); }
};

/// Risk whose value at beta equals the mean squared residual of the sample
/// (or population) behind the moments.
QuadraticRisk from_moments(const EnvironmentMoments& m);

/// Worst-case out-of-sample risk over shifts at most gamma times as strong as
/// any unit-weighted average of the observed shifts:
///
///   f(beta) = max_i h_i(beta),   h_i = (1+tau) R_i - tau R_O,
///
/// with tau = (gamma-1)/2. The same maximum decomposes as
/// (1/2) R_+^w + (gamma/2) R_-^w under the optimal weight vector w, which
/// concentrates (in squared weight) on the environments attaining the max.
class WorstRiskObjective {
 public:
  WorstRiskObjective(std::vector<QuadraticRisk> shifted, QuadraticRisk observational, double gamma);

  double gamma() const { return gamma_; }
  double tau() const { return tau_; }
  int num_shifted() const { return static_cast<int>(shifted_.size()); }
  Eigen::Index dim() const { return observational_.dim(); }
  const QuadraticRisk& shifted(int i) const { return shifted_[static_cast<std::size_t>(i)]; }
  const QuadraticRisk& observational() const { return observational_; }

  /// h_i(beta).
  double penalized_risk(int i, const Eigen::VectorXd& beta) const;
  /// h_i as an explicit quadratic triple (1+tau)(G_i,z_i,c_i) - tau(G_O,z_O,c_O).
  QuadraticRisk penalized_quadratic(int i) const;

  struct Evaluation {
    double value = 0.0;
    std::vector<int> argmax_envs;  // 0-based, all i within tie tolerance of the max
  };
  Evaluation worst_risk(const Eigen::VectorXd& beta) const;

  /// Unit-norm weights with squared mass uniform over the tied argmax set and
  /// zero elsewhere.
  Eigen::VectorXd optimal_weights(const Eigen::VectorXd& beta) const;

  /// (1/2) R_+^{w*} + ((1+2 tau)/2) R_-^{w*} at the optimal weights; equals
  /// worst_risk(beta).value up to roundoff.
  double decomposition_value(const Eigen::VectorXd& beta) const;

  static double tie_tolerance(double max_value);

 private:
  std::vector<QuadraticRisk> shifted_;
  QuadraticRisk observational_;
  double gamma_;
  double tau_;
};

WorstRiskObjective objective_from_moments(const std::vector<EnvironmentMoments>& shifted,
                                          const EnvironmentMoments& observational, double gamma);

}  // namespace wrisk
