#include "wrisk/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wrisk/errors.hpp"

namespace wrisk {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Separation lower bound for the gap between simple roots, computed in log
/// space: the direct formula underflows already at moderate degrees.
double separation_bound(const Polynomial& p) {
  const int n = p.degree();
  if (n < 2) return kInf;
  double s = 0.0;
  for (double c : p.coeffs()) s += std::abs(c);
  const double log_disc = log_abs_discriminant(p);
  if (!std::isfinite(log_disc) && log_disc < 0) return 0.0;
  const double dn = static_cast<double>(n);
  const double log_delta =
      dn * (std::log(dn) + 1.0) * std::log(std::max(1.0, std::abs(p.leading_coeff()))) + log_disc +
      (dn - 1.0) * std::log(2.0 * dn) - dn * (std::log(dn) + 3.0) * std::log(s);
  if (log_delta > 700.0) return kInf;
  if (log_delta < -700.0) return 0.0;
  return std::exp(log_delta);
}

struct Scan {
  const Polynomial& poly;
  double lipschitz;  // bound on |P'| over [-bound, bound]
  double coarse_tol;
  double residual_tol;
  double max_abs_coeff;
  int degree;
  std::int64_t evals_left;  // work budget for recursive subdivision

  double node_tol(double x) const {
    return residual_tol * (1.0 + max_abs_coeff) * std::pow(1.0 + std::abs(x), degree);
  }
  bool is_node_root(double x, double value) const {
    const double v = std::abs(value);
    return v <= coarse_tol && v <= node_tol(x);
  }
};

struct FoundRoot {
  double x;
  double residual;
};

double bisect(const Polynomial& poly, double lo, double hi, double value_lo, RootMode mode, int budget,
              double refine_tol, int& steps_used) {
  int steps = 0;
  const int max_steps = (mode == RootMode::kBudgetedBisection) ? budget : 4096;
  while (steps < max_steps) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at floating-point resolution
    const double value_mid = poly(mid);
    ++steps;
    if (value_mid == 0.0) {
      steps_used = std::max(steps_used, steps);
      return mid;
    }
    if (std::signbit(value_mid) == std::signbit(value_lo))
      lo = mid;
    else
      hi = mid;
    if (mode == RootMode::kExactRefine && (hi - lo) <= refine_tol * std::max(1.0, std::abs(mid))) break;
  }
  steps_used = std::max(steps_used, steps);
  return 0.5 * (lo + hi);
}

void record_bisection(const Scan& scan, double lo, double hi, double value_lo, RootMode mode, int budget,
                      double refine_tol, int& steps_used, std::vector<FoundRoot>& roots) {
  const double r = bisect(scan.poly, lo, hi, value_lo, mode, budget, refine_tol, steps_used);
  roots.push_back({r, std::abs(scan.poly(r))});
}

/// Recursive sign-change search on an interval whose endpoints agree in sign.
/// A Lipschitz certificate prunes intervals that provably contain no root;
/// the rest split until a sign change or a residual hit appears, or the
/// depth/work budget runs out (counted in `unresolved`).
void subdivide(Scan& scan, double lo, double hi, double value_lo, double value_hi, int depth, RootMode mode,
               int budget, double refine_tol, int& steps_used, std::vector<FoundRoot>& roots,
               std::int64_t& unresolved) {
  const double width = hi - lo;
  if (std::max(std::abs(value_lo), std::abs(value_hi)) > scan.lipschitz * width) return;
  if (scan.evals_left <= 0) {
    ++unresolved;
    return;
  }
  const double mid = 0.5 * (lo + hi);
  if (mid <= lo || mid >= hi) {
    ++unresolved;
    return;
  }
  --scan.evals_left;
  const double value_mid = scan.poly(mid);
  if (scan.is_node_root(mid, value_mid)) {
    roots.push_back({mid, std::abs(value_mid)});
    return;
  }
  if (std::signbit(value_mid) != std::signbit(value_lo)) {
    // Endpoints agree, midpoint differs: a bracket on each side.
    record_bisection(scan, lo, mid, value_lo, mode, budget, refine_tol, steps_used, roots);
    record_bisection(scan, mid, hi, value_mid, mode, budget, refine_tol, steps_used, roots);
    return;
  }
  if (depth <= 0) {
    ++unresolved;
    return;
  }
  subdivide(scan, lo, mid, value_lo, value_mid, depth - 1, mode, budget, refine_tol, steps_used, roots,
            unresolved);
  subdivide(scan, mid, hi, value_mid, value_hi, depth - 1, mode, budget, refine_tol, steps_used, roots,
            unresolved);
}

/// Collapses clusters of reported roots. Bracket duplicates merge inside
/// `dedupe_tol`; residual hits merge whenever the polynomial stays within the
/// residual tolerance between them (one numerically-zero plateau, one root).
std::vector<double> merge_roots(const Scan& scan, std::vector<FoundRoot> found, double dedupe_tol) {
  std::sort(found.begin(), found.end(), [](const FoundRoot& a, const FoundRoot& b) { return a.x < b.x; });
  std::vector<double> out;
  std::size_t u = 0;
  while (u < found.size()) {
    FoundRoot best = found[u];
    double cluster_end = found[u].x;
    std::size_t v = u + 1;
    for (; v < found.size(); ++v) {
      const double gap = found[v].x - cluster_end;
      bool same = gap <= dedupe_tol;
      if (!same && scan.residual_tol > 0.0) {
        same = true;
        for (int q = 1; q <= 3 && same; ++q) {
          const double x = cluster_end + gap * 0.25 * q;
          if (!scan.is_node_root(x, scan.poly(x))) same = false;
        }
      }
      if (!same) break;
      if (found[v].residual < best.residual) best = found[v];
      cluster_end = found[v].x;
    }
    out.push_back(best.x);
    u = v;
  }
  return out;
}

}  // namespace

RootIsolationReport isolate_real_roots(const Polynomial& p, const RootIsolationOptions& options) {
  if (p.is_zero()) throw std::invalid_argument("isolate_real_roots: zero polynomial");
  const int degree = p.degree();
  if (degree < 1) throw std::invalid_argument("isolate_real_roots: degree must be >= 1");
  if (options.bisection_budget < 1) throw std::invalid_argument("isolate_real_roots: budget must be >= 1");

  const auto& coeffs = p.coeffs();
  const double lead = coeffs.back();
  double ratio_sum = 0.0;
  for (int u = 0; u < degree; ++u) ratio_sum += std::abs(coeffs[u] / lead);
  const double bound = std::max(1.0, ratio_sum);

  const double separation = separation_bound(p);

  const double span = 2.0 * bound;
  std::int64_t intervals;
  if (!(separation > options.separation_floor)) {
    intervals = options.max_intervals;
  } else if (std::isinf(separation)) {
    intervals = 16;
  } else {
    const double wanted = std::ceil(span / separation) + 1.0;
    intervals = wanted >= static_cast<double>(options.max_intervals)
                    ? options.max_intervals
                    : std::max<std::int64_t>(16, static_cast<std::int64_t>(wanted));
  }
  const double width = span / static_cast<double>(intervals);
  const bool cap_binds = width >= separation;

  double lipschitz = 0.0;
  for (int u = 1; u <= degree; ++u)
    lipschitz += static_cast<double>(u) * std::abs(coeffs[u]) * std::pow(bound, u - 1);

  Scan scan{p,
            lipschitz,
            options.residual_tol * (1.0 + p.max_abs_coeff()) * std::pow(1.0 + bound, degree),
            options.residual_tol,
            p.max_abs_coeff(),
            degree,
            4 * options.max_intervals};

  std::vector<FoundRoot> found;
  std::int64_t unresolved = 0;
  int steps_used = 0;

  double prev_x = -bound;
  double prev_value = p(prev_x);
  bool prev_is_root = scan.is_node_root(prev_x, prev_value);
  if (prev_is_root) found.push_back({prev_x, std::abs(prev_value)});

  for (std::int64_t t = 1; t <= intervals; ++t) {
    const double x = (t == intervals) ? bound : -bound + width * static_cast<double>(t);
    const double value = p(x);
    const bool node_root = scan.is_node_root(x, value);
    if (node_root) found.push_back({x, std::abs(value)});

    if (!node_root && !prev_is_root) {
      if (std::signbit(value) != std::signbit(prev_value)) {
        record_bisection(scan, prev_x, x, prev_value, options.mode, options.bisection_budget,
                         options.refine_tol, steps_used, found);
      } else if (cap_binds) {
        subdivide(scan, prev_x, x, prev_value, value, options.fallback_depth, options.mode,
                  options.bisection_budget, options.refine_tol, steps_used, found, unresolved);
      }
    }
    prev_x = x;
    prev_value = value;
    prev_is_root = node_root;
  }

  if (unresolved > 0 && separation <= options.separation_floor)
    throw DegenerateSeparationError(
        "isolate_real_roots: separation bound underflowed and subdivision could not separate signs "
        "(near-multiple roots)");

  const double dedupe_tol = (options.mode == RootMode::kBudgetedBisection)
                                ? width * std::pow(2.0, -options.bisection_budget)
                                : 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, bound);

  RootIsolationReport report;
  report.roots = merge_roots(scan, std::move(found), dedupe_tol);
  report.bound = bound;
  report.separation = separation;
  report.intervals_scanned = intervals;
  report.bisections_per_root =
      (options.mode == RootMode::kBudgetedBisection) ? options.bisection_budget : steps_used;
  report.mode = options.mode;
  return report;
}

RootIsolationReport isolate_real_roots(const Polynomial& p, int bisection_budget, RootMode mode) {
  RootIsolationOptions options;
  options.mode = mode;
  options.bisection_budget = bisection_budget;
  return isolate_real_roots(p, options);
}

}  // namespace wrisk
