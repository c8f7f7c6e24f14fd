#include "wrisk/oracle.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "wrisk/errors.hpp"
#include "wrisk/rng.hpp"

namespace wrisk {

std::int64_t GridSpec::points_per_axis() const {
  return static_cast<std::int64_t>(std::floor(2.0 * radius / step + 1e-9)) + 1;
}

void GridSpec::validate() const {
  if (radius <= 0.0 || step <= 0.0 || dim < 1)
    throw std::invalid_argument("GridSpec: radius > 0, step > 0, dim >= 1 required");
  if (step > radius) throw std::invalid_argument("GridSpec: step must not exceed radius");
  const double total = std::pow(static_cast<double>(points_per_axis()), dim);
  if (total > kMaxPoints)
    throw GridGuardExceededError("GridSpec: lattice of " + std::to_string(total) +
                                 " points exceeds the exhaustive-search guard");
}

namespace {

struct ShardResult {
  double value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd argmin;
};

/// Envelope minimization over one contiguous range of the first coordinate.
/// The innermost coordinate is evaluated through per-environment quadratic
/// row coefficients, which keeps the hot loop at a few flops per point.
ShardResult scan_range(const std::vector<QuadraticRisk>& penalized, const GridSpec& grid,
                       std::int64_t first_begin, std::int64_t first_end) {
  const int dim = grid.dim;
  const std::int64_t per_axis = grid.points_per_axis();
  const std::size_t k = penalized.size();

  ShardResult best;
  Eigen::VectorXd beta(dim);
  std::vector<std::int64_t> index(static_cast<std::size_t>(dim), 0);
  std::vector<double> row_a(k), row_b(k), row_c(k);

  const auto coordinate = [&](std::int64_t t) { return -grid.radius + grid.step * static_cast<double>(t); };

  index[0] = first_begin;
  while (index[0] < first_end) {
    for (int d = 0; d < dim; ++d) beta[d] = coordinate(index[static_cast<std::size_t>(d)]);

    // Coefficients of each h_i along the innermost coordinate x:
    // h_i = a x^2 + b x + c with the other coordinates frozen.
    const int last = dim - 1;
    for (std::size_t i = 0; i < k; ++i) {
      const QuadraticRisk& h = penalized[i];
      row_a[i] = h.gram(last, last);
      double linear = -h.cross[last];
      double constant = h.offset;
      for (int d = 0; d < last; ++d) {
        linear += h.gram(last, d) * beta[d];
        constant -= 2.0 * h.cross[d] * beta[d];
        for (int e = 0; e < last; ++e) constant += h.gram(d, e) * beta[d] * beta[e];
      }
      row_b[i] = 2.0 * linear;
      row_c[i] = constant;
    }

    for (std::int64_t t = 0; t < per_axis; ++t) {
      const double x = coordinate(t);
      double value = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < k; ++i) {
        const double h = (row_a[i] * x + row_b[i]) * x + row_c[i];
        if (h > value) value = h;
      }
      if (value < best.value) {
        best.value = value;
        beta[last] = x;
        best.argmin = beta;
      }
    }

    // Advance the outer odometer (coordinates 0..dim-2).
    int d = dim - 2;
    for (; d >= 1; --d) {
      if (++index[static_cast<std::size_t>(d)] < per_axis) break;
      index[static_cast<std::size_t>(d)] = 0;
    }
    if (d >= 1) continue;
    if (dim == 1) break;
    ++index[0];
  }
  return best;
}

}  // namespace

GridMinimum grid_minimize(const WorstRiskObjective& objective, const GridSpec& grid) {
  grid.validate();
  if (grid.dim != objective.dim())
    throw std::invalid_argument("grid_minimize: grid dimension does not match the objective");

  std::vector<QuadraticRisk> penalized;
  penalized.reserve(static_cast<std::size_t>(objective.num_shifted()));
  for (int i = 0; i < objective.num_shifted(); ++i) penalized.push_back(objective.penalized_quadratic(i));

  const std::int64_t per_axis = grid.points_per_axis();
  const std::int64_t first_range = (grid.dim == 1) ? 1 : per_axis;

  unsigned int workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  const std::int64_t shards =
      std::min<std::int64_t>(first_range, static_cast<std::int64_t>(std::min(workers, 16u)));

  std::vector<std::future<ShardResult>> futures;
  for (std::int64_t s = 0; s < shards; ++s) {
    const std::int64_t begin = first_range * s / shards;
    const std::int64_t end = first_range * (s + 1) / shards;
    futures.push_back(std::async(std::launch::async, [&, begin, end] {
      return scan_range(penalized, grid, begin, end);
    }));
  }

  // Shards cover increasing first-coordinate blocks; reducing them in order
  // with strict improvement keeps the lexicographically first tie.
  GridMinimum best;
  best.value = std::numeric_limits<double>::infinity();
  for (auto& future : futures) {
    const ShardResult shard = future.get();
    if (shard.value < best.value) {
      best.value = shard.value;
      best.argmin = shard.argmin;
    }
  }
  if (!best.argmin.size()) throw Error("grid_minimize: empty lattice");
  return best;
}

double sphere_max_risk(const WorstRiskObjective& objective, const Eigen::VectorXd& beta,
                       std::int64_t n_dirs, std::uint64_t seed) {
  if (n_dirs < 1) throw std::invalid_argument("sphere_max_risk: need n_dirs >= 1");
  const int k = objective.num_shifted();
  const double tau = objective.tau();
  const double risk_obs = objective.observational()(beta);

  std::vector<double> risks(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) risks[static_cast<std::size_t>(i)] = objective.shifted(i)(beta);

  const auto value_for = [&](const Eigen::VectorXd& w) {
    double weighted = 0.0;
    for (int i = 0; i < k; ++i) weighted += w[i] * w[i] * risks[static_cast<std::size_t>(i)];
    return (1.0 + tau) * weighted - tau * risk_obs;
  };

  double best = -std::numeric_limits<double>::infinity();
  // Axis directions first: the optimizer concentrates on argmax environments.
  Eigen::VectorXd axis = Eigen::VectorXd::Zero(k);
  for (int i = 0; i < k; ++i) {
    axis.setZero();
    axis[i] = 1.0;
    best = std::max(best, value_for(axis));
  }

  Rng rng(seed);
  Eigen::VectorXd w(k);
  for (std::int64_t t = 0; t < n_dirs; ++t) {
    double norm2 = 0.0;
    do {
      for (int i = 0; i < k; ++i) w[i] = rng.normal();
      norm2 = w.squaredNorm();
    } while (norm2 < 1e-12);
    w /= std::sqrt(norm2);
    best = std::max(best, value_for(w));
  }
  return best;
}

double suggest_radius(const WorstRiskObjective& objective) {
  double radius = 0.0;
  for (int i = 0; i < objective.num_shifted(); ++i) {
    const QuadraticRisk h = objective.penalized_quadratic(i);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(h.gram);
    const double min_eig = eigen.eigenvalues().minCoeff();
    if (min_eig <= 0.0) return std::numeric_limits<double>::infinity();
    radius = std::max(radius, 2.0 * (h.cross.norm() + std::sqrt(std::abs(h.offset))) / min_eig);
  }
  return radius;
}

}  // namespace wrisk
