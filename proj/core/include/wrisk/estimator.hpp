#pragma once

#include <Eigen/Dense>

#include <limits>
#include <string>
#include <vector>

#include "wrisk/errors.hpp"
#include "wrisk/moments.hpp"
#include "wrisk/pencil.hpp"
#include "wrisk/risk.hpp"
#include "wrisk/roots.hpp"

namespace wrisk {

/// A finite minimizer candidate: either the unconstrained minimizer of one
/// penalized risk h_i, or a constrained minimizer of R_i on {R_i = R_j}
/// reached through a Lagrange multiplier lambda.
struct Candidate {
  enum class Kind { kInflexion, kIntersection };
  Kind kind = Kind::kInflexion;
  int env_i = -1;
  int env_j = -1;  // intersection only
  double lambda = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd beta;
  double objective = 0.0;  // f(beta)
};

struct EstimatorConfig {
  RootMode root_mode = RootMode::kExactRefine;
  int bisection_budget = 60;
  /// Multiplier roots within det_exclusion_tol*(1+|lambda|) of a root of
  /// det M(lambda) are discarded: the linear system has no solution there.
  double det_exclusion_tol = 1e-7;
  /// Tolerance for R_i = R_j verification and for envelope activity.
  double envelope_tol = 1e-7;
  /// Relative smallest-singular-value cutoff; below it a candidate's linear
  /// solve is skipped rather than regularized.
  double singular_tol = 1e-10;

  RootIsolationOptions root_options() const;
};

/// The parametric linear system M(lambda) beta = C(lambda) whose solutions
/// trace the stationary points of R_i restricted to {R_i = R_j}:
/// M(0) = G_i, M(1) = G_j, C(0) = z_i, C(1) = z_j.
struct LagrangeSystem {
  AffinePencil pencil;
  Eigen::VectorXd c0;
  Eigen::VectorXd c1;

  Eigen::VectorXd rhs_at(double lambda) const { return c0 + lambda * c1; }
};

LagrangeSystem build_lagrange_system(const QuadraticRisk& risk_i, const QuadraticRisk& risk_j);
LagrangeSystem build_lagrange_system(const EnvironmentMoments& env_i, const EnvironmentMoments& env_j);

/// The polynomial det(M(lambda))^2 * (R_i - R_j)(beta(lambda)) whose real
/// roots are the admissible Lagrange multipliers. With D = det M, N the
/// Cramer numerators and (dG, dz, dc) the coefficient differences of the two
/// risks, it expands to N^T dG N - 2 D (dz . N) + D^2 dc, degree <= 2p.
/// Throws ZeroPolynomialError when every coefficient trims away (the two
/// risks agree along the whole solution curve).
Polynomial intersection_polynomial(const QuadraticRisk& risk_i, const QuadraticRisk& risk_j);
Polynomial intersection_polynomial(const EnvironmentMoments& env_i, const EnvironmentMoments& env_j);

struct IntersectionRootInfo {
  double lambda = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd beta;
  double risk_i = std::numeric_limits<double>::quiet_NaN();
  double risk_j = std::numeric_limits<double>::quiet_NaN();
  bool excluded_near_det = false;
  bool solvable = true;
  bool verified = false;
  bool selected = false;
};

struct PairDiagnostics {
  int env_i = -1;
  int env_j = -1;
  bool zero_polynomial = false;   // R_i - R_j vanished along the curve
  bool zero_determinant = false;  // det M(lambda) identically zero
  std::vector<double> det_roots;
  std::vector<IntersectionRootInfo> roots;
  std::string note;
};

/// One candidate per shifted environment: the solution of
/// ((1+gamma) G_i + (1-gamma) G_O) beta = (1+gamma) z_i + (1-gamma) z_O.
/// Environments whose combined matrix is numerically singular are skipped
/// and reported through `warnings`.
std::vector<Candidate> inflexion_candidates(const WorstRiskObjective& objective,
                                            const EstimatorConfig& config = {},
                                            std::vector<std::string>* warnings = nullptr);

/// Constrained minimizers of R_i on {R_i = R_j}: isolates the real roots of
/// the intersection polynomial, drops multiplier values where det M(lambda)
/// vanishes, solves the linear system at the survivors, verifies R_i = R_j,
/// and keeps the R_i-argmin (ties included). Empty when the risks do not
/// intersect.
std::vector<Candidate> intersection_candidates(const WorstRiskObjective& objective, int env_i, int env_j,
                                               const EstimatorConfig& config = {},
                                               PairDiagnostics* diagnostics = nullptr);

struct CandidateRecord {
  Candidate candidate;
  bool kept = false;
  std::string reason;
};

struct EstimatorReport {
  std::vector<CandidateRecord> candidates;
  std::vector<PairDiagnostics> pairs;
  std::vector<std::string> warnings;
  int selected = -1;  // index into `candidates`, -1 if none
};

class NoCandidateError : public Error {
 public:
  NoCandidateError(const std::string& what, EstimatorReport report)
      : Error(what), report_(std::move(report)) {}
  const EstimatorReport& report() const { return report_; }

 private:
  EstimatorReport report_;
};

struct MinimizeResult {
  Candidate best;
  EstimatorReport report;
};

/// The worst-risk minimizer: assembles inflexion and intersection candidates,
/// keeps those active on the envelope (an inflexion of h_i counts when i
/// attains the max at its beta; an intersection of (i, j) when either does),
/// and returns the candidate with the smallest f. Ties break deterministically
/// by generation order. Throws NoCandidateError (report attached) when every
/// candidate was skipped or filtered.
MinimizeResult minimize_worst_risk(const WorstRiskObjective& objective, const EstimatorConfig& config = {});

/// Human-readable candidate table.
std::string format_report(const EstimatorReport& report);

}  // namespace wrisk
