#include "wrisk/semgen.hpp"

#include <cmath>
#include <stdexcept>

#include "wrisk/errors.hpp"

namespace wrisk {
namespace {

constexpr double kConditionLimit = 1e12;
constexpr double kProbabilityTol = 1e-12;

void check_psd(const Eigen::MatrixXd& m, int dim, const std::string& field) {
  if (m.rows() != dim || m.cols() != dim)
    throw SpecValidationError(field + ": expected a " + std::to_string(dim) + "x" + std::to_string(dim) +
                              " matrix");
  if (!m.allFinite()) throw SpecValidationError(field + ": non-finite entries");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + m.cwiseAbs().maxCoeff()))
    throw SpecValidationError(field + ": matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(m);
  const double tol = 1e-10 * std::max(1.0, m.trace() / static_cast<double>(dim));
  if (eigen.eigenvalues().minCoeff() < -tol)
    throw SpecValidationError(field + ": matrix is not positive semi-definite");
}

/// Factor L with L L^T = cov (eigendecomposition, tiny negatives clipped).
Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(cov);
  const Eigen::VectorXd clipped = eigen.eigenvalues().cwiseMax(0.0);
  return eigen.eigenvectors() * clipped.cwiseSqrt().asDiagonal();
}

double unit_draw(Rng& rng, NoiseFamily family) {
  return family == NoiseFamily::kGaussian ? rng.normal() : rng.symmetric_uniform_unit();
}

}  // namespace

void SemSpec::validate() const {
  const int dim = system_dim();
  if (covariate_dim < 1) throw SpecValidationError("p: must be >= 1");
  if (num_shifted < 1) throw SpecValidationError("k: must be >= 1");
  if (transfer.empty()) throw SpecValidationError("B: need at least one transfer matrix");
  if (transfer.size() != probabilities.size())
    throw SpecValidationError("probs: length must match the number of B matrices");

  double sum = 0.0;
  for (std::size_t l = 0; l < probabilities.size(); ++l) {
    if (probabilities[l] < 0.0)
      throw SpecValidationError("probs[" + std::to_string(l) + "]: must be >= 0");
    sum += probabilities[l];
  }
  if (std::abs(sum - 1.0) > kProbabilityTol)
    throw SpecValidationError("probs: must sum to 1 (got " + std::to_string(sum) + ")");

  for (std::size_t l = 0; l < transfer.size(); ++l) {
    const std::string field = "B[" + std::to_string(l) + "]";
    if (transfer[l].rows() != dim || transfer[l].cols() != dim)
      throw SpecValidationError(field + ": expected a " + std::to_string(dim) + "x" +
                                std::to_string(dim) + " matrix");
    if (!transfer[l].allFinite()) throw SpecValidationError(field + ": non-finite entries");
    const Eigen::MatrixXd residual = Eigen::MatrixXd::Identity(dim, dim) - transfer[l];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual);
    const double smallest = svd.singularValues()(svd.singularValues().size() - 1);
    if (smallest <= 0.0 || svd.singularValues()(0) / smallest > kConditionLimit)
      throw SpecValidationError(field + ": I - B is singular or too ill-conditioned (condition > 1e12)");
  }

  check_psd(noise_cov, dim, "noise_cov");
  if (static_cast<int>(shift_covs.size()) != num_shifted)
    throw SpecValidationError("shift_covs: expected k = " + std::to_string(num_shifted) + " matrices");
  for (std::size_t i = 0; i < shift_covs.size(); ++i)
    check_psd(shift_covs[i], dim, "shift_covs[" + std::to_string(i) + "]");

  if (!shift_means.empty()) {
    if (static_cast<int>(shift_means.size()) != num_shifted)
      throw SpecValidationError("shift_means: expected k = " + std::to_string(num_shifted) + " vectors");
    for (std::size_t i = 0; i < shift_means.size(); ++i) {
      if (shift_means[i].size() != dim)
        throw SpecValidationError("shift_means[" + std::to_string(i) + "]: expected length " +
                                  std::to_string(dim));
      if (shift_means[i].cwiseAbs().maxCoeff() != 0.0)
        throw SpecValidationError(
            "shift_means[" + std::to_string(i) +
            "]: shifts must be centered; noise-shift orthogonality forces zero-mean shifts "
            "whenever the noise is nondegenerate");
    }
  }
}

std::string env_label(int env) { return env == 0 ? std::string("O") : "A" + std::to_string(env); }

EnvironmentSample sample_environment(const SemSpec& spec, int env, std::int64_t n, SemDraws* detail) {
  spec.validate();
  if (env < 0 || env > spec.num_shifted)
    throw std::invalid_argument("sample_environment: env index out of range");
  if (n < 1) throw std::invalid_argument("sample_environment: need n >= 1");

  const int dim = spec.system_dim();
  const int p = spec.covariate_dim;

  std::vector<Eigen::MatrixXd> solvers;  // (I - B_l)^{-1}
  solvers.reserve(spec.transfer.size());
  for (const auto& b : spec.transfer)
    solvers.push_back((Eigen::MatrixXd::Identity(dim, dim) - b).inverse());

  const Eigen::MatrixXd noise_factor = covariance_factor(spec.noise_cov);
  const bool has_shift = env >= 1;
  const Eigen::MatrixXd shift_factor =
      has_shift ? covariance_factor(spec.shift_covs[static_cast<std::size_t>(env - 1)])
                : Eigen::MatrixXd();

  EnvironmentSample sample;
  sample.env_id = env_label(env);
  sample.x.resize(n, p);
  sample.y.resize(n);
  if (detail) {
    detail->regime.assign(static_cast<std::size_t>(n), 0);
    detail->noise.resize(n, dim);
    detail->shift.resize(n, dim);
  }

  Eigen::VectorXd unit(dim), noise(dim), shift(dim), solution(dim);
  for (std::int64_t u = 0; u < n; ++u) {
    Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(env), static_cast<std::uint64_t>(u)));
    const int regime = rng.categorical(spec.probabilities);
    for (int d = 0; d < dim; ++d) unit[d] = unit_draw(rng, spec.noise_family);
    noise = noise_factor * unit;
    if (has_shift) {
      for (int d = 0; d < dim; ++d) unit[d] = unit_draw(rng, spec.noise_family);
      shift = shift_factor * unit;
    } else {
      shift.setZero();
    }
    solution = solvers[static_cast<std::size_t>(regime)] * (noise + shift);
    sample.y[u] = solution[0];
    sample.x.row(u) = solution.tail(p).transpose();
    if (detail) {
      detail->regime[static_cast<std::size_t>(u)] = regime;
      detail->noise.row(u) = noise.transpose();
      detail->shift.row(u) = shift.transpose();
    }
  }
  return sample;
}

EnvironmentMoments population_moments(const SemSpec& spec, int env) {
  spec.validate();
  if (env < 0 || env > spec.num_shifted)
    throw std::invalid_argument("population_moments: env index out of range");

  const int dim = spec.system_dim();
  Eigen::MatrixXd input_cov = spec.noise_cov;
  if (env >= 1) input_cov += spec.shift_covs[static_cast<std::size_t>(env - 1)];

  Eigen::MatrixXd second_moment = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t l = 0; l < spec.transfer.size(); ++l) {
    const Eigen::MatrixXd solver =
        (Eigen::MatrixXd::Identity(dim, dim) - spec.transfer[l]).inverse();
    second_moment += spec.probabilities[l] * solver * input_cov * solver.transpose();
  }

  EnvironmentMoments m;
  m.gram = second_moment.bottomRightCorner(spec.covariate_dim, spec.covariate_dim);
  m.gram = ((m.gram + m.gram.transpose()) * 0.5).eval();
  m.cross = second_moment.block(1, 0, spec.covariate_dim, 1);
  m.target_second_moment = second_moment(0, 0);
  m.sample_size = std::nullopt;
  return m;
}

namespace {

Eigen::VectorXd solve_fixed_point(const VectorMap& f, const Eigen::VectorXd& shift,
                                  const Eigen::VectorXd& noise) {
  constexpr double kDamping = 0.5;
  constexpr int kMaxIterations = 500;
  constexpr double kTolerance = 1e-10;
  Eigen::VectorXd v = noise;
  for (int it = 0; it < kMaxIterations; ++it) {
    const Eigen::VectorXd next = (1.0 - kDamping) * v + kDamping * (f(v + shift) + noise);
    const double change = (next - v).norm();
    v = next;
    if (change <= kTolerance * (1.0 + v.norm())) return v;
  }
  throw FixedPointDivergenceError("embed_nonlinear: fixed-point iteration did not converge");
}

}  // namespace

EmbeddingResult embed_nonlinear(const VectorMap& f, int system_dim,
                                const std::vector<Eigen::VectorXd>& shifts, const NoiseSampler& noise,
                                std::int64_t n, std::uint64_t seed) {
  const int dim = system_dim;
  const int p = dim - 1;
  if (dim < 2) throw std::invalid_argument("embed_nonlinear: system dimension must be >= 2");
  if (static_cast<int>(shifts.size()) > p)
    throw SpecValidationError("shifts: at most p = " + std::to_string(p) +
                              " shifted environments fit a " + std::to_string(dim) + "-dimensional system");
  for (const auto& shift : shifts)
    if (shift.size() != dim)
      throw SpecValidationError("shifts: each shift vector must have length " + std::to_string(dim));

  // Canonical inputs: unit noise on the first coordinate, unit shift on the
  // (i+1)-th; C = [e1, e1+e2, ..., e1+e_{p+1}] is unit upper triangular.
  Eigen::MatrixXd canonical = Eigen::MatrixXd::Zero(dim, dim);
  canonical.row(0).setOnes();
  for (int i = 1; i < dim; ++i) canonical(i, i) = 1.0;

  std::vector<Eigen::VectorXd> padded = shifts;
  while (static_cast<int>(padded.size()) < p) padded.push_back(Eigen::VectorXd::Zero(dim));

  constexpr std::int64_t kMaxConsecutiveRejects = 1000;
  constexpr double kSingularTol = 1e-10;

  EmbeddingResult result;
  result.canonical_inputs = canonical;
  result.draws.reserve(static_cast<std::size_t>(n));

  std::uint64_t attempt = 0;
  std::int64_t consecutive_rejects = 0;
  for (std::int64_t u = 0; u < n; ++u) {
    while (true) {
      Rng rng(mix_seed(seed, 0x17, attempt++));
      Eigen::MatrixXd solutions(dim, dim);
      for (int envc = 0; envc < dim; ++envc) {
        const Eigen::VectorXd eta = noise(rng);
        if (eta.size() != dim)
          throw std::invalid_argument("embed_nonlinear: noise sampler returned wrong dimension");
        const Eigen::VectorXd shift =
            envc == 0 ? Eigen::VectorXd::Zero(dim) : padded[static_cast<std::size_t>(envc - 1)];
        solutions.col(envc) = solve_fixed_point(f, shift, eta);
      }

      Eigen::JacobiSVD<Eigen::MatrixXd> svd(solutions);
      const auto& sv = svd.singularValues();
      if (sv(0) <= 0.0 || sv(sv.size() - 1) < kSingularTol * sv(0)) {
        ++result.rejected_singular;
        if (++consecutive_rejects >= kMaxConsecutiveRejects)
          throw SingularEmbeddingError(
              "embed_nonlinear: solution matrix persistently singular; transfer matrix cannot be fitted");
        continue;
      }
      consecutive_rejects = 0;

      EmbeddingDraw draw;
      draw.nonlinear_solutions = solutions;
      // (I - B)^{-1} C = D  <=>  B = I - C D^{-1}.
      draw.transfer =
          Eigen::MatrixXd::Identity(dim, dim) - canonical * solutions.partialPivLu().inverse();
      const Eigen::MatrixXd reproduced =
          (Eigen::MatrixXd::Identity(dim, dim) - draw.transfer).partialPivLu().solve(canonical);
      draw.roundtrip_error =
          (reproduced - solutions).norm() / std::max(1.0, solutions.norm());
      result.max_roundtrip_error = std::max(result.max_roundtrip_error, draw.roundtrip_error);
      result.draws.push_back(std::move(draw));
      break;
    }
  }
  return result;
}

}  // namespace wrisk
