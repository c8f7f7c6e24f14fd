#include "wrisk/polynomial.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <utility>

namespace wrisk {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

Polynomial::Polynomial(std::initializer_list<double> coeffs) : coeffs_(coeffs) { trim(); }

Polynomial Polynomial::constant(double value) { return Polynomial{value}; }

Polynomial Polynomial::from_roots(std::span<const double> roots) {
  Polynomial result{1.0};
  for (double r : roots) result = result * Polynomial{-r, 1.0};
  return result;
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double Polynomial::max_abs_coeff() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return Polynomial{};
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t u = 1; u < coeffs_.size(); ++u) d[u - 1] = static_cast<double>(u) * coeffs_[u];
  return Polynomial(std::move(d));
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size(), 0.0);
  for (std::size_t u = 0; u < other.coeffs_.size(); ++u) coeffs_[u] += other.coeffs_[u];
  trim();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size(), 0.0);
  for (std::size_t u = 0; u < other.coeffs_.size(); ++u) coeffs_[u] -= other.coeffs_[u];
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(double scale) {
  for (double& c : coeffs_) c *= scale;
  trim();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return Polynomial{};
  std::vector<double> prod(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (std::size_t u = 0; u < a.coeffs_.size(); ++u)
    for (std::size_t v = 0; v < b.coeffs_.size(); ++v) prod[u + v] += a.coeffs_[u] * b.coeffs_[v];
  return Polynomial(std::move(prod));
}

std::string Polynomial::to_string() const {
  if (is_zero()) return "0";
  std::string out = "[";
  char buf[32];
  for (std::size_t u = 0; u < coeffs_.size(); ++u) {
    std::snprintf(buf, sizeof(buf), "%.12g", coeffs_[u]);
    if (u) out += ", ";
    out += buf;
  }
  out += "]";
  return out;
}

void Polynomial::trim() {
  const double threshold = kTrimRel * max_abs_coeff();
  while (!coeffs_.empty() && std::abs(coeffs_.back()) <= threshold) coeffs_.pop_back();
}

namespace {

/// log|det| of a square matrix through a pivoted LU, avoiding overflow for
/// the large-entry Sylvester matrices of high-degree inputs.
double log_abs_det(const Eigen::MatrixXd& m) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  const auto& diag = lu.matrixLU().diagonal();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    const double d = std::abs(diag[i]);
    if (d == 0.0) return -std::numeric_limits<double>::infinity();
    acc += std::log(d);
  }
  return acc;
}

}  // namespace

double log_abs_resultant(const Polynomial& a, const Polynomial& b) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (a.is_zero() || b.is_zero()) return kNegInf;
  const int n = a.degree();
  const int m = b.degree();
  if (n == 0) return m * std::log(std::abs(a.leading_coeff()));
  if (m == 0) return n * std::log(std::abs(b.leading_coeff()));

  Eigen::MatrixXd sylvester = Eigen::MatrixXd::Zero(n + m, n + m);
  // Descending-order coefficient rows: m shifted copies of a, n of b.
  for (int row = 0; row < m; ++row)
    for (int u = 0; u <= n; ++u) sylvester(row, row + u) = a.coeffs()[n - u];
  for (int row = 0; row < n; ++row)
    for (int u = 0; u <= m; ++u) sylvester(m + row, row + u) = b.coeffs()[m - u];
  return log_abs_det(sylvester);
}

double log_abs_discriminant(const Polynomial& p) {
  if (p.degree() < 2) throw std::invalid_argument("discriminant requires degree >= 2");
  const double log_res = log_abs_resultant(p, p.derivative());
  return log_res - std::log(std::abs(p.leading_coeff()));
}

}  // namespace wrisk
