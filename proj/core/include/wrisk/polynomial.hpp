#pragma once

#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace wrisk {

/// Dense univariate polynomial, real coefficients in ascending degree order.
///
/// Trailing coefficients whose magnitude is at most kTrimRel * max|coeff| are
/// stripped on construction, so degree() always points at a numerically
/// meaningful leading term. The zero polynomial has no coefficients and
/// degree -1.
class Polynomial {
 public:
  static constexpr double kTrimRel = 1e-12;

  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);
  Polynomial(std::initializer_list<double> coeffs);

  static Polynomial constant(double value);
  /// Monic polynomial with the given real roots.
  static Polynomial from_roots(std::span<const double> roots);

  /// Horner evaluation.
  double operator()(double x) const;

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double leading_coeff() const { return coeffs_.empty() ? 0.0 : coeffs_.back(); }
  double max_abs_coeff() const;

  Polynomial derivative() const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double scale);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) {
    a += b;
    return a;
  }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) {
    a -= b;
    return a;
  }
  friend Polynomial operator*(Polynomial a, double s) {
    a *= s;
    return a;
  }
  friend Polynomial operator*(double s, Polynomial a) {
    a *= s;
    return a;
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  std::string to_string() const;

 private:
  void trim();

  std::vector<double> coeffs_;
};

/// log|resultant(a, b)| from the Sylvester determinant; -infinity when the
/// resultant vanishes. Computed in log space to survive large degrees.
double log_abs_resultant(const Polynomial& a, const Polynomial& b);

/// log|discriminant(p)|; requires degree >= 2.
double log_abs_discriminant(const Polynomial& p);

}  // namespace wrisk
