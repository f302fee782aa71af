#pragma once

#include <cmath>
#include <complex>
#include <initializer_list>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace arx {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Real polynomial c_0 + c_1 z + ... + c_d z^d, constant term first.
///
/// Trailing zero coefficients are trimmed on construction, so `degree()` is
/// the index of the last nonzero coefficient. The zero polynomial keeps a
/// single zero coefficient and reports degree 0; use `is_zero()` to tell it
/// apart from a nonzero constant.
template <typename Scalar>
class Polynomial {
 public:
  Polynomial() : coeffs_(Vector<Scalar>::Zero(1)) {}

  explicit Polynomial(Vector<Scalar> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

  Polynomial(std::initializer_list<Scalar> coeffs)
      : coeffs_(static_cast<Eigen::Index>(coeffs.size())) {
    Eigen::Index i = 0;
    for (Scalar c : coeffs) coeffs_(i++) = c;
    trim();
  }

  const Vector<Scalar>& coeffs() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  Scalar operator[](int i) const { return i <= degree() ? coeffs_(i) : Scalar(0); }
  bool is_zero() const { return degree() == 0 && coeffs_(0) == Scalar(0); }

  template <typename T>
  std::complex<T> evaluate(std::complex<T> z) const {
    std::complex<T> acc(0);
    for (Eigen::Index i = coeffs_.size() - 1; i >= 0; --i)
      acc = acc * z + static_cast<T>(coeffs_(i));
    return acc;
  }

  /// Complex zeros from the eigenvalues of the companion matrix of the
  /// monic normalization. Empty for constants.
  std::vector<std::complex<Scalar>> roots() const {
    const int d = degree();
    if (d == 0) return {};
    Matrix<Scalar> companion = Matrix<Scalar>::Zero(d, d);
    const Scalar lead = coeffs_(d);
    for (int j = 0; j < d; ++j) companion(0, j) = -coeffs_(d - 1 - j) / lead;
    for (int i = 1; i < d; ++i) companion(i, i - 1) = Scalar(1);
    Eigen::EigenSolver<Matrix<Scalar>> solver(companion, false);
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
  }

  Scalar norm() const { return coeffs_.norm(); }

  friend Polynomial operator-(const Polynomial& f, Scalar c) {
    Vector<Scalar> out = f.coeffs_;
    out(0) -= c;
    return Polynomial(std::move(out));
  }

  friend Polynomial operator*(const Polynomial& f, const Polynomial& g) {
    Vector<Scalar> out = Vector<Scalar>::Zero(f.degree() + g.degree() + 1);
    for (int i = 0; i <= f.degree(); ++i)
      for (int j = 0; j <= g.degree(); ++j) out(i + j) += f.coeffs_(i) * g.coeffs_(j);
    return Polynomial(std::move(out));
  }

 private:
  void trim() {
    if (coeffs_.size() == 0) {
      coeffs_ = Vector<Scalar>::Zero(1);
      return;
    }
    Eigen::Index last = coeffs_.size() - 1;
    while (last > 0 && coeffs_(last) == Scalar(0)) --last;
    coeffs_.conservativeResize(last + 1);
  }

  Vector<Scalar> coeffs_;
};

/// Sylvester matrix of f (degree m) and g (degree n), of order m + n.
template <typename Scalar>
Matrix<Scalar> sylvester_matrix(const Polynomial<Scalar>& f, const Polynomial<Scalar>& g) {
  const int m = f.degree();
  const int n = g.degree();
  Matrix<Scalar> s = Matrix<Scalar>::Zero(m + n, m + n);
  // Rows hold coefficients highest degree first.
  for (int r = 0; r < n; ++r)
    for (int i = 0; i <= m; ++i) s(r, r + i) = f[m - i];
  for (int r = 0; r < m; ++r)
    for (int j = 0; j <= n; ++j) s(n + r, r + j) = g[n - j];
  return s;
}

/// Resultant of f and g. Zero iff they share a complex root (for nonzero
/// leading coefficients). Resultant with a nonzero constant is c^deg.
template <typename Scalar>
Scalar resultant(const Polynomial<Scalar>& f, const Polynomial<Scalar>& g) {
  if (f.degree() == 0 && g.degree() == 0) return Scalar(1);
  if (f.degree() == 0) return std::pow(f[0], g.degree());
  if (g.degree() == 0) return std::pow(g[0], f.degree());
  return sylvester_matrix(f, g).fullPivLu().determinant();
}

}  // namespace arx
