#include "wrisk/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace wrisk {

RootIsolationOptions EstimatorConfig::root_options() const {
  RootIsolationOptions options;
  options.mode = root_mode;
  options.bisection_budget = bisection_budget;
  return options;
}

LagrangeSystem build_lagrange_system(const QuadraticRisk& risk_i, const QuadraticRisk& risk_j) {
  if (risk_i.dim() != risk_j.dim())
    throw std::invalid_argument("build_lagrange_system: dimension mismatch");
  return LagrangeSystem{AffinePencil(risk_i.gram, risk_j.gram - risk_i.gram), risk_i.cross,
                        risk_j.cross - risk_i.cross};
}

LagrangeSystem build_lagrange_system(const EnvironmentMoments& env_i, const EnvironmentMoments& env_j) {
  return build_lagrange_system(from_moments(env_i), from_moments(env_j));
}

Polynomial intersection_polynomial(const QuadraticRisk& risk_i, const QuadraticRisk& risk_j) {
  const LagrangeSystem system = build_lagrange_system(risk_i, risk_j);
  const Polynomial det = pencil_det_polynomial(system.pencil);
  const std::vector<Polynomial> numerators = cramer_numerators(system.pencil, system.c0, system.c1);

  const Eigen::MatrixXd delta_gram = risk_i.gram - risk_j.gram;
  const Eigen::VectorXd delta_cross = risk_i.cross - risk_j.cross;
  const double delta_offset = risk_i.offset - risk_j.offset;
  const Eigen::Index p = risk_i.dim();

  Polynomial result;
  for (Eigen::Index u = 0; u < p; ++u)
    for (Eigen::Index v = 0; v < p; ++v) {
      const double coeff = delta_gram(u, v);
      if (coeff != 0.0)
        result += coeff * (numerators[static_cast<std::size_t>(u)] *
                           numerators[static_cast<std::size_t>(v)]);
    }
  Polynomial linear;
  for (Eigen::Index u = 0; u < p; ++u)
    linear += delta_cross[u] * numerators[static_cast<std::size_t>(u)];
  result -= 2.0 * (det * linear);
  result += delta_offset * (det * det);

  if (result.is_zero())
    throw ZeroPolynomialError(
        "intersection_polynomial: risks agree along the solution curve (zero polynomial)");
  return result;
}

Polynomial intersection_polynomial(const EnvironmentMoments& env_i, const EnvironmentMoments& env_j) {
  return intersection_polynomial(from_moments(env_i), from_moments(env_j));
}

namespace {

struct SolveOutcome {
  Eigen::VectorXd beta;
  bool ok = false;
};

/// Solve m * beta = rhs, refusing (rather than regularizing) when the matrix
/// is numerically rank deficient.
SolveOutcome solve_checked(const Eigen::MatrixXd& m, const Eigen::VectorXd& rhs, double singular_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  SolveOutcome out;
  if (sv.size() == 0 || sv(0) <= 0.0) return out;
  if (sv(sv.size() - 1) < singular_tol * sv(0)) return out;
  out.beta = svd.solve(rhs);
  out.ok = true;
  return out;
}

std::string env_name(int i) { return "A" + std::to_string(i + 1); }

}  // namespace

std::vector<Candidate> inflexion_candidates(const WorstRiskObjective& objective,
                                            const EstimatorConfig& config,
                                            std::vector<std::string>* warnings) {
  std::vector<Candidate> candidates;
  const double gamma = objective.gamma();
  for (int i = 0; i < objective.num_shifted(); ++i) {
    const CombinedSystem system =
        combine_plusdelta(objective.shifted(i).gram, objective.shifted(i).cross,
                          objective.observational().gram, objective.observational().cross, gamma);
    const SolveOutcome solved = solve_checked(system.gram, system.cross, config.singular_tol);
    if (!solved.ok) {
      if (warnings)
        warnings->push_back("inflexion " + env_name(i) +
                            ": combined matrix numerically singular, candidate skipped");
      continue;
    }
    Candidate c;
    c.kind = Candidate::Kind::kInflexion;
    c.env_i = i;
    c.beta = solved.beta;
    c.objective = objective.worst_risk(c.beta).value;
    candidates.push_back(std::move(c));
  }
  return candidates;
}

std::vector<Candidate> intersection_candidates(const WorstRiskObjective& objective, int env_i, int env_j,
                                               const EstimatorConfig& config,
                                               PairDiagnostics* diagnostics) {
  if (env_i == env_j) throw std::invalid_argument("intersection_candidates: environments must differ");
  PairDiagnostics local;
  PairDiagnostics& diag = diagnostics ? *diagnostics : local;
  diag.env_i = env_i;
  diag.env_j = env_j;

  const QuadraticRisk& risk_i = objective.shifted(env_i);
  const QuadraticRisk& risk_j = objective.shifted(env_j);
  const LagrangeSystem system = build_lagrange_system(risk_i, risk_j);

  const Polynomial det = pencil_det_polynomial(system.pencil);
  if (det.is_zero()) {
    diag.zero_determinant = true;
    diag.note = "det M(lambda) identically zero";
    return {};
  }

  Polynomial curve;
  try {
    curve = intersection_polynomial(risk_i, risk_j);
  } catch (const ZeroPolynomialError&) {
    diag.zero_polynomial = true;
    diag.note = "risks agree along the solution curve; no isolated intersection";
    return {};
  }

  if (det.degree() >= 1)
    diag.det_roots = isolate_real_roots(det, config.root_options()).roots;
  if (curve.degree() < 1) {
    diag.note = "intersection polynomial is a nonzero constant; risks do not intersect";
    return {};
  }
  const std::vector<double> lambdas = isolate_real_roots(curve, config.root_options()).roots;

  double best_risk = std::numeric_limits<double>::infinity();
  for (double lambda : lambdas) {
    IntersectionRootInfo info;
    info.lambda = lambda;

    bool near_det = false;
    for (double d : diag.det_roots)
      if (std::abs(lambda - d) <= config.det_exclusion_tol * (1.0 + std::abs(lambda))) near_det = true;
    info.excluded_near_det = near_det;
    if (!near_det) {
      const SolveOutcome solved =
          solve_checked(system.pencil.at(lambda), system.rhs_at(lambda), config.singular_tol);
      info.solvable = solved.ok;
      if (solved.ok) {
        info.beta = solved.beta;
        info.risk_i = risk_i(solved.beta);
        info.risk_j = risk_j(solved.beta);
        info.verified =
            std::abs(info.risk_i - info.risk_j) <= config.envelope_tol * (1.0 + std::abs(info.risk_i));
        if (info.verified) best_risk = std::min(best_risk, info.risk_i);
      }
    }
    diag.roots.push_back(std::move(info));
  }

  std::vector<Candidate> candidates;
  if (!std::isfinite(best_risk)) return candidates;
  const double tie_tol = WorstRiskObjective::tie_tolerance(best_risk);
  for (auto& info : diag.roots) {
    if (!info.verified || info.risk_i > best_risk + tie_tol) continue;
    info.selected = true;
    Candidate c;
    c.kind = Candidate::Kind::kIntersection;
    c.env_i = env_i;
    c.env_j = env_j;
    c.lambda = info.lambda;
    c.beta = info.beta;
    c.objective = objective.worst_risk(c.beta).value;
    candidates.push_back(std::move(c));
  }
  return candidates;
}

MinimizeResult minimize_worst_risk(const WorstRiskObjective& objective, const EstimatorConfig& config) {
  EstimatorReport report;

  std::vector<Candidate> all = inflexion_candidates(objective, config, &report.warnings);
  for (int i = 0; i < objective.num_shifted(); ++i)
    for (int j = i + 1; j < objective.num_shifted(); ++j) {
      PairDiagnostics diag;
      std::vector<Candidate> pair;
      try {
        pair = intersection_candidates(objective, i, j, config, &diag);
      } catch (const DegenerateSeparationError& e) {
        diag.note = e.what();
        report.warnings.push_back("intersection (" + env_name(i) + "," + env_name(j) + "): " + e.what());
      }
      report.pairs.push_back(std::move(diag));
      for (auto& c : pair) all.push_back(std::move(c));
    }

  int best_index = -1;
  for (auto& candidate : all) {
    const WorstRiskObjective::Evaluation eval = objective.worst_risk(candidate.beta);
    const double activity_tol = config.envelope_tol * (1.0 + std::abs(eval.value));

    CandidateRecord record;
    record.candidate = candidate;

    if (candidate.kind == Candidate::Kind::kInflexion) {
      const double own = objective.penalized_risk(candidate.env_i, candidate.beta);
      record.kept = own >= eval.value - activity_tol;
      record.reason = record.kept ? "active on envelope"
                                  : "filtered: " + env_name(candidate.env_i) + " not maximal here";
    } else {
      const double own_i = objective.penalized_risk(candidate.env_i, candidate.beta);
      const double own_j = objective.penalized_risk(candidate.env_j, candidate.beta);
      record.kept = own_i >= eval.value - activity_tol || own_j >= eval.value - activity_tol;
      record.reason = record.kept ? "active on envelope" : "filtered: pair below the envelope";
    }

    report.candidates.push_back(std::move(record));
    const int index = static_cast<int>(report.candidates.size()) - 1;
    if (report.candidates[static_cast<std::size_t>(index)].kept &&
        (best_index < 0 ||
         candidate.objective < report.candidates[static_cast<std::size_t>(best_index)].candidate.objective))
      best_index = index;
  }

  report.selected = best_index;
  if (best_index < 0)
    throw NoCandidateError("minimize_worst_risk: no usable candidate (degenerate inputs)", report);

  MinimizeResult result;
  result.best = report.candidates[static_cast<std::size_t>(best_index)].candidate;
  result.report = std::move(report);
  return result;
}

std::string format_report(const EstimatorReport& report) {
  std::ostringstream out;
  char buf[64];
  for (std::size_t u = 0; u < report.candidates.size(); ++u) {
    const CandidateRecord& record = report.candidates[u];
    const Candidate& c = record.candidate;
    out << (static_cast<int>(u) == report.selected ? "* " : "  ");
    if (c.kind == Candidate::Kind::kInflexion) {
      out << "inflexion " << env_name(c.env_i);
    } else {
      std::snprintf(buf, sizeof(buf), "%.9g", c.lambda);
      out << "intersection (" << env_name(c.env_i) << "," << env_name(c.env_j) << ") lambda=" << buf;
    }
    out << " beta=[";
    for (Eigen::Index v = 0; v < c.beta.size(); ++v) {
      std::snprintf(buf, sizeof(buf), "%.9g", c.beta[v]);
      out << (v ? ", " : "") << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.9g", c.objective);
    out << "] f=" << buf << " " << (record.kept ? "kept" : "dropped") << " (" << record.reason << ")\n";
  }
  for (const auto& warning : report.warnings) out << "  warning: " << warning << "\n";
  return out.str();
}

}  // namespace wrisk
