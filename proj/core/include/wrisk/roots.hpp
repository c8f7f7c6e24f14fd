#pragma once

#include <cstdint>
#include <vector>

#include "wrisk/polynomial.hpp"

namespace wrisk {

enum class RootMode { kExactRefine, kBudgetedBisection };

struct RootIsolationOptions {
  RootMode mode = RootMode::kExactRefine;
  /// Bisections per sign-change bracket in budgeted mode.
  int bisection_budget = 60;
  /// Relative bracket-width target in exact-refine mode.
  double refine_tol = 1e-15;
  /// |P(x)| <= residual_tol * (1 + max|e_u|) * (1 + |x|)^degree counts as a
  /// root hit at x, which catches roots landing exactly on grid nodes.
  double residual_tol = 1e-9;
  /// Cap on the uniform scan partition; the separation bound is usually far
  /// too small in floating point to honor directly.
  std::int64_t max_intervals = std::int64_t{1} << 20;
  /// Recursive subdivision depth on coarse intervals once the cap binds.
  int fallback_depth = 60;
  /// Below this the separation bound counts as underflowed.
  double separation_floor = 1e-30;
};

struct RootIsolationReport {
  std::vector<double> roots;  // strictly increasing
  /// All real roots lie in [-bound, bound] (coefficient-ratio bound).
  double bound = 0.0;
  /// Discriminant-based lower bound on the gap between simple roots.
  double separation = 0.0;
  std::int64_t intervals_scanned = 0;
  int bisections_per_root = 0;
  RootMode mode = RootMode::kExactRefine;
};

/// Isolates every real root of `p` (degree >= 1).
///
/// The scan interval [-R, R] comes from the coefficient-ratio root bound
/// R = max(1, sum |e_u / e_deg|). The target partition width is the
/// discriminant-based separation lower bound, capped at max_intervals
/// subintervals; when the cap binds, intervals without an endpoint sign
/// change are recursively subdivided (with a Lipschitz no-root certificate
/// pruning almost all of them) down to fallback_depth. Each sign-change
/// bracket is then bisected: a fixed budget of steps in budgeted mode, or
/// until the bracket width reaches refine_tol in exact-refine mode.
///
/// Roots of even multiplicity produce no sign change and are found only if
/// the residual rule fires near them; when the separation bound underflows
/// and subdivision cannot resolve an interval, DegenerateSeparationError is
/// thrown instead of silently dropping the region.
RootIsolationReport isolate_real_roots(const Polynomial& p, const RootIsolationOptions& options = {});

RootIsolationReport isolate_real_roots(const Polynomial& p, int bisection_budget, RootMode mode);

}  // namespace wrisk
