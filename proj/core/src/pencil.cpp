#include "wrisk/pencil.hpp"

#include <stdexcept>
#include <utility>

namespace wrisk {

AffinePencil::AffinePencil(Eigen::MatrixXd m0_in, Eigen::MatrixXd m1_in)
    : m0(std::move(m0_in)), m1(std::move(m1_in)) {
  if (m0.rows() != m0.cols() || m1.rows() != m1.cols() || m0.rows() != m1.rows() || m0.rows() < 1)
    throw std::invalid_argument("AffinePencil: M0, M1 must be square with equal dimension >= 1");
}

namespace {

/// Interpolating polynomial through (u, values[u]) for u = 0..m, via Newton
/// divided differences expanded back to the monomial basis.
Polynomial interpolate_on_integer_nodes(const std::vector<double>& values) {
  const std::size_t count = values.size();
  std::vector<double> dd = values;
  for (std::size_t order = 1; order < count; ++order)
    for (std::size_t u = count - 1; u >= order; --u)
      dd[u] = (dd[u] - dd[u - 1]) / static_cast<double>(order);

  Polynomial result;
  Polynomial basis{1.0};
  for (std::size_t u = 0; u < count; ++u) {
    result += dd[u] * basis;
    basis = basis * Polynomial{-static_cast<double>(u), 1.0};
  }
  return result;
}

double det_at(const Eigen::MatrixXd& m) { return Eigen::PartialPivLU<Eigen::MatrixXd>(m).determinant(); }

}  // namespace

Polynomial pencil_det_polynomial(const AffinePencil& pencil) {
  const Eigen::Index p = pencil.dim();
  std::vector<double> values(static_cast<std::size_t>(p) + 1);
  for (Eigen::Index node = 0; node <= p; ++node)
    values[static_cast<std::size_t>(node)] = det_at(pencil.at(static_cast<double>(node)));
  return interpolate_on_integer_nodes(values);
}

std::vector<Polynomial> cramer_numerators(const AffinePencil& pencil, const Eigen::VectorXd& c0,
                                          const Eigen::VectorXd& c1) {
  const Eigen::Index p = pencil.dim();
  if (c0.size() != p || c1.size() != p)
    throw std::invalid_argument("cramer_numerators: vector dimensions must match the pencil");

  std::vector<std::vector<double>> values(static_cast<std::size_t>(p),
                                          std::vector<double>(static_cast<std::size_t>(p) + 1));
  for (Eigen::Index node = 0; node <= p; ++node) {
    const double lambda = static_cast<double>(node);
    const Eigen::MatrixXd m = pencil.at(lambda);
    const Eigen::VectorXd rhs = c0 + lambda * c1;
    for (Eigen::Index col = 0; col < p; ++col) {
      Eigen::MatrixXd replaced = m;
      replaced.col(col) = rhs;
      values[static_cast<std::size_t>(col)][static_cast<std::size_t>(node)] = det_at(replaced);
    }
  }

  std::vector<Polynomial> numerators;
  numerators.reserve(static_cast<std::size_t>(p));
  for (Eigen::Index col = 0; col < p; ++col)
    numerators.push_back(interpolate_on_integer_nodes(values[static_cast<std::size_t>(col)]));
  return numerators;
}

}  // namespace wrisk
