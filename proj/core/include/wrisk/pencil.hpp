#pragma once

#include <Eigen/Dense>

#include <vector>

#include "wrisk/polynomial.hpp"

namespace wrisk {

/// Affine matrix pencil M(lambda) = M0 + lambda * M1.
struct AffinePencil {
  Eigen::MatrixXd m0;
  Eigen::MatrixXd m1;

  AffinePencil(Eigen::MatrixXd m0_in, Eigen::MatrixXd m1_in);

  Eigen::Index dim() const { return m0.rows(); }
  Eigen::MatrixXd at(double lambda) const { return m0 + lambda * m1; }
};

/// det(M0 + lambda*M1), an explicit polynomial of degree <= dim.
///
/// The determinant is evaluated at the integer nodes 0, 1, ..., dim and the
/// coefficients are recovered by Newton interpolation. Exact in exact
/// arithmetic; the small integer nodes keep the interpolation well
/// conditioned in the low dimensions this library targets.
Polynomial pencil_det_polynomial(const AffinePencil& pencil);

/// Cramer numerators N_u(lambda) = det(M(lambda) with column u replaced by
/// C(lambda)), where C(lambda) = c0 + lambda*c1. Wherever det M(lambda) != 0
/// the solution of M(lambda) beta = C(lambda) is beta_u = N_u / det.
std::vector<Polynomial> cramer_numerators(const AffinePencil& pencil, const Eigen::VectorXd& c0,
                                          const Eigen::VectorXd& c1);

}  // namespace wrisk
