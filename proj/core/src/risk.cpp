#include "wrisk/risk.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace wrisk {

double QuadraticRisk::operator()(const Eigen::VectorXd& beta) const {
  return beta.dot(gram * beta) - 2.0 * beta.dot(cross) + offset;
}

Eigen::VectorXd QuadraticRisk::gradient(const Eigen::VectorXd& beta) const {
  return 2.0 * (gram * beta - cross);
}

QuadraticRisk from_moments(const EnvironmentMoments& m) {
  return QuadraticRisk{m.gram, m.cross, m.target_second_moment};
}

WorstRiskObjective::WorstRiskObjective(std::vector<QuadraticRisk> shifted, QuadraticRisk observational,
                                       double gamma)
    : shifted_(std::move(shifted)), observational_(std::move(observational)), gamma_(gamma),
      tau_((gamma - 1.0) / 2.0) {
  if (gamma_ < 0.0) throw std::invalid_argument("WorstRiskObjective: gamma must be >= 0");
  if (shifted_.empty()) throw std::invalid_argument("WorstRiskObjective: need at least one environment");
  for (const auto& risk : shifted_)
    if (risk.dim() != observational_.dim())
      throw std::invalid_argument("WorstRiskObjective: environment dimensions differ");
}

double WorstRiskObjective::penalized_risk(int i, const Eigen::VectorXd& beta) const {
  return (1.0 + tau_) * shifted_[static_cast<std::size_t>(i)](beta) - tau_ * observational_(beta);
}

QuadraticRisk WorstRiskObjective::penalized_quadratic(int i) const {
  const QuadraticRisk& env = shifted_[static_cast<std::size_t>(i)];
  QuadraticRisk h;
  h.gram = (1.0 + tau_) * env.gram - tau_ * observational_.gram;
  h.cross = (1.0 + tau_) * env.cross - tau_ * observational_.cross;
  h.offset = (1.0 + tau_) * env.offset - tau_ * observational_.offset;
  return h;
}

double WorstRiskObjective::tie_tolerance(double max_value) { return 1e-9 * (1.0 + std::abs(max_value)); }

WorstRiskObjective::Evaluation WorstRiskObjective::worst_risk(const Eigen::VectorXd& beta) const {
  const int k = num_shifted();
  const double risk_obs = observational_(beta);
  std::vector<double> values(static_cast<std::size_t>(k));
  double max_value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    values[static_cast<std::size_t>(i)] =
        (1.0 + tau_) * shifted_[static_cast<std::size_t>(i)](beta) - tau_ * risk_obs;
    max_value = std::max(max_value, values[static_cast<std::size_t>(i)]);
  }
  Evaluation eval;
  eval.value = max_value;
  const double tol = tie_tolerance(max_value);
  for (int i = 0; i < k; ++i)
    if (values[static_cast<std::size_t>(i)] >= max_value - tol) eval.argmax_envs.push_back(i);
  return eval;
}

Eigen::VectorXd WorstRiskObjective::optimal_weights(const Eigen::VectorXd& beta) const {
  const Evaluation eval = worst_risk(beta);
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(num_shifted());
  const double w = 1.0 / std::sqrt(static_cast<double>(eval.argmax_envs.size()));
  for (int i : eval.argmax_envs) weights[i] = w;
  return weights;
}

double WorstRiskObjective::decomposition_value(const Eigen::VectorXd& beta) const {
  const Eigen::VectorXd weights = optimal_weights(beta);
  double weighted = 0.0;
  for (int i = 0; i < num_shifted(); ++i)
    weighted += weights[i] * weights[i] * shifted_[static_cast<std::size_t>(i)](beta);
  const double risk_obs = observational_(beta);
  const double plus = weighted + risk_obs;
  const double delta = weighted - risk_obs;
  return 0.5 * plus + 0.5 * gamma_ * delta;
}

WorstRiskObjective objective_from_moments(const std::vector<EnvironmentMoments>& shifted,
                                          const EnvironmentMoments& observational, double gamma) {
  std::vector<QuadraticRisk> risks;
  risks.reserve(shifted.size());
  for (const auto& m : shifted) risks.push_back(from_moments(m));
  return WorstRiskObjective(std::move(risks), from_moments(observational), gamma);
}

}  // namespace wrisk
