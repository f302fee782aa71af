#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "arx/errors.hpp"
#include "arx/polynomial.hpp"

namespace arx {

/// Scalar ARX(p,q) model in adaptive tracking form
///
///   X_{n+1} = a_1 X_n + ... + a_p X_{n-p+1} + U_n + b_1 U_{n-1} + ... + b_q U_{n-q} + eps_{n+1}
///
/// The coefficients are stored as they enter theta, not as the signed
/// polynomial coefficients: A(z) = 1 - a_1 z - ... - a_p z^p and
/// B(z) = 1 + b_1 z + ... + b_q z^q.
template <typename Scalar>
class ArxModel {
 public:
  ArxModel(Vector<Scalar> a, Vector<Scalar> b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_.size() < 1 || b_.size() < 1)
      throw ValidationError("ARX model needs p >= 1 and q >= 1");
  }

  int p() const { return static_cast<int>(a_.size()); }
  int q() const { return static_cast<int>(b_.size()); }
  int dim() const { return p() + q(); }
  const Vector<Scalar>& a() const { return a_; }
  const Vector<Scalar>& b() const { return b_; }

  /// theta = (a_1, ..., a_p, b_1, ..., b_q).
  Vector<Scalar> theta() const {
    Vector<Scalar> t(dim());
    t << a_, b_;
    return t;
  }

  Polynomial<Scalar> A() const {
    Vector<Scalar> c(p() + 1);
    c(0) = Scalar(1);
    c.tail(p()) = -a_;
    return Polynomial<Scalar>(std::move(c));
  }

  Polynomial<Scalar> B() const {
    Vector<Scalar> c(q() + 1);
    c(0) = Scalar(1);
    c.tail(q()) = b_;
    return Polynomial<Scalar>(std::move(c));
  }

  template <typename Other>
  ArxModel<Other> cast() const {
    return ArxModel<Other>(a_.template cast<Other>(), b_.template cast<Other>());
  }

 private:
  Vector<Scalar> a_;
  Vector<Scalar> b_;
};

inline constexpr double kCausalityMargin = 1e-9;
inline constexpr double kCoprimeThreshold = 1e-9;

template <typename Scalar>
struct CausalityCheck {
  bool is_causal;
  Scalar min_root_modulus;
};

/// Every zero of B must lie strictly outside the closed unit disk (with a
/// 1e-9 margin). The zeros come from the companion matrix of the reversal
/// z^q B(1/z), which is monic because B(0) = 1; its eigenvalues are the
/// reciprocals of the zeros of B.
template <typename Scalar>
CausalityCheck<Scalar> check_causality(const Polynomial<Scalar>& B) {
  const int q = B.degree();
  if (q == 0) return {true, std::numeric_limits<Scalar>::infinity()};
  if (B[0] != Scalar(1)) throw ValidationError("B must have constant term 1");
  Vector<Scalar> rev(q + 1);
  for (int i = 0; i <= q; ++i) rev(i) = B[q - i];
  Scalar largest(0);
  for (const auto& lambda : Polynomial<Scalar>(std::move(rev)).roots())
    largest = std::max(largest, std::abs(lambda));
  // b_q != 0 after trimming, so no eigenvalue of the reversal is zero.
  const Scalar min_mod = Scalar(1) / largest;
  return {min_mod > Scalar(1 + kCausalityMargin), min_mod};
}

enum class ControllabilityStatus { kCoprime, kCommonRoot, kDegenerateA };

template <typename Scalar>
struct ControllabilityCheck {
  ControllabilityStatus status;
  Scalar resultant;  ///< res(A - 1, B)
  Scalar threshold;  ///< 1e-9 * ||A - 1||^deg(B) * ||B||^deg(A - 1)

  bool controllable() const { return status == ControllabilityStatus::kCoprime; }
};

/// A(z) - 1 and B(z) coprime, decided on the Sylvester resultant against a
/// scale-invariant threshold. A == 1 is reported as kDegenerateA.
template <typename Scalar>
ControllabilityCheck<Scalar> check_controllability(const Polynomial<Scalar>& A,
                                                   const Polynomial<Scalar>& B) {
  if (A[0] != Scalar(1) || B[0] != Scalar(1))
    throw ValidationError("A and B must have constant term 1");
  const Polynomial<Scalar> f = A - Scalar(1);
  if (f.is_zero()) return {ControllabilityStatus::kDegenerateA, Scalar(0), Scalar(0)};
  const Scalar res = resultant(f, B);
  const Scalar scale = std::pow(f.norm(), B.degree()) * std::pow(B.norm(), f.degree());
  const Scalar threshold = Scalar(kCoprimeThreshold) * scale;
  return {std::abs(res) > threshold ? ControllabilityStatus::kCoprime
                                    : ControllabilityStatus::kCommonRoot,
          res, threshold};
}

template <typename Scalar>
bool is_controllable(const Polynomial<Scalar>& A, const Polynomial<Scalar>& B) {
  return check_controllability(A, B).controllable();
}

/// Throws ValidationError naming the failed check.
template <typename Scalar>
void validate(const ArxModel<Scalar>& model) {
  const auto causal = check_causality(model.B());
  if (!causal.is_causal)
    throw ValidationError("causality check failed: B has a zero of modulus " +
                          std::to_string(static_cast<double>(causal.min_root_modulus)) +
                          " <= 1");
  const auto ctrl = check_controllability(model.A(), model.B());
  if (ctrl.status == ControllabilityStatus::kDegenerateA)
    throw ValidationError("controllability check failed: A(z) - 1 is identically zero");
  if (ctrl.status == ControllabilityStatus::kCommonRoot)
    throw ValidationError("controllability check failed: A(z) - 1 and B(z) share a root");
}

/// Truncated coefficients p_1..p_K of P(z) = (A(z) - 1) / B(z).
template <typename Scalar>
struct ImpulseSeries {
  Vector<Scalar> coeffs;  ///< coeffs(k - 1) = p_k
  int truncation = 0;
  Scalar tail_bound{0};  ///< bound on sum_{k > K} |p_k|
  Scalar min_root_modulus{0};
  Scalar envelope_radius{0};  ///< r used in |p_k| <= envelope * r^-k
  Scalar envelope{0};

  Scalar operator()(int k) const { return k >= 1 && k <= truncation ? coeffs(k - 1) : Scalar(0); }

  /// Upper bound on sup_k |p_k| over all k, truncated or not.
  Scalar sup_bound() const {
    Scalar m = coeffs.size() > 0 ? coeffs.cwiseAbs().maxCoeff() : Scalar(0);
    return std::max(m, tail_bound);
  }
};

namespace detail {

/// max |P(z)| on |z| = r by dense sampling of the circle.
template <typename Scalar>
Scalar envelope_on_circle(const Polynomial<Scalar>& num, const Polynomial<Scalar>& den,
                          Scalar r) {
  constexpr int kSamples = 4096;
  Scalar best(0);
  for (int s = 0; s < kSamples; ++s) {
    const Scalar angle = Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(s) / Scalar(kSamples);
    const std::complex<Scalar> z = std::polar(r, angle);
    best = std::max(best, std::abs(num.evaluate(z) / den.evaluate(z)));
  }
  return best;
}

}  // namespace detail

namespace detail {

/// Series from p_k = -a_k - sum_{j=1}^{min(k-1,q)} b_j p_{k-j} (a_k = 0
/// beyond p) with a precomputed envelope M on |z| = r.
template <typename Scalar>
ImpulseSeries<Scalar> impulse_series(const ArxModel<Scalar>& model, int K, Scalar min_root_modulus,
                                     Scalar envelope) {
  ImpulseSeries<Scalar> s;
  s.truncation = K;
  s.min_root_modulus = min_root_modulus;
  s.coeffs.resize(K);
  const auto& a = model.a();
  const auto& b = model.b();
  for (int k = 1; k <= K; ++k) {
    Scalar v = k <= model.p() ? -a(k - 1) : Scalar(0);
    for (int j = 1; j <= std::min(k - 1, model.q()); ++j) v -= b(j - 1) * s.coeffs(k - j - 1);
    s.coeffs(k - 1) = v;
  }

  if (std::isinf(min_root_modulus)) {
    // B == 1: P is the polynomial A - 1 itself.
    s.envelope_radius = std::numeric_limits<Scalar>::infinity();
    s.tail_bound =
        K >= model.p() ? Scalar(0) : model.a().tail(model.p() - K).cwiseAbs().sum();
    return s;
  }
  const Scalar r = std::sqrt(min_root_modulus);
  s.envelope_radius = r;
  s.envelope = envelope;
  s.tail_bound = envelope * std::pow(r, -Scalar(K)) / (r - Scalar(1));
  return s;
}

template <typename Scalar>
Scalar series_envelope(const ArxModel<Scalar>& model, Scalar min_root_modulus) {
  if (std::isinf(min_root_modulus)) return Scalar(0);
  return envelope_on_circle(model.A() - Scalar(1), model.B(), std::sqrt(min_root_modulus));
}

}  // namespace detail

/// Coefficients p_1..p_K from matching orders in B(z) P(z) = A(z) - 1. The
/// tail bound is the Cauchy estimate |p_k| <= M r^-k with
/// r = sqrt(min root modulus of B) and M = max_{|z|=r} |P(z)|.
template <typename Scalar>
ImpulseSeries<Scalar> impulse_coefficients_truncated(const ArxModel<Scalar>& model, int K) {
  if (K < 1) throw ValidationError("truncation must be >= 1");
  const auto causal = check_causality(model.B());
  if (!causal.is_causal) throw ValidationError("impulse series requires a causal B");
  return detail::impulse_series(model, K, causal.min_root_modulus,
                                detail::series_envelope(model, causal.min_root_modulus));
}

/// Adaptive truncation: start from K = max(p + q, ceil(log tol / log rho)),
/// rho = 1 / min root modulus, and double K until the tail bound drops below
/// rel_tol * (1 + sum |p_k|).
template <typename Scalar>
ImpulseSeries<Scalar> impulse_coefficients(const ArxModel<Scalar>& model, Scalar rel_tol) {
  if (!(rel_tol > Scalar(0) && rel_tol < Scalar(1)))
    throw ValidationError("rel_tol must lie in (0, 1)");
  const auto causal = check_causality(model.B());
  if (!causal.is_causal) throw ValidationError("impulse series requires a causal B");
  const Scalar envelope = detail::series_envelope(model, causal.min_root_modulus);

  constexpr int kMaxTruncation = 1 << 22;
  int K = model.dim();
  if (std::isfinite(causal.min_root_modulus)) {
    const Scalar rho = Scalar(1) / causal.min_root_modulus;
    const Scalar guess = std::ceil(std::log(rel_tol) / std::log(rho));
    K = std::max<int>(K, static_cast<int>(std::min<Scalar>(guess, Scalar(kMaxTruncation))));
  }
  for (;;) {
    auto s = detail::impulse_series(model, K, causal.min_root_modulus, envelope);
    if (s.tail_bound < rel_tol * (Scalar(1) + s.coeffs.cwiseAbs().sum())) return s;
    if (K >= kMaxTruncation)
      throw NumericalError("impulse series did not reach tolerance; B has a zero too close to "
                           "the unit circle");
    K = std::min(2 * K, kMaxTruncation);
  }
}

template <typename Scalar>
struct HEntries {
  Vector<Scalar> values;  ///< values(i - 1) = h_i
  Scalar tail_estimate{0};
};

/// h_i = sum_{k=i}^K p_k p_{k-i+1}; the omitted tail of every h_i is bounded
/// by sup|p| * sum_{k>K} |p_k|.
template <typename Scalar>
HEntries<Scalar> h_entries(const ImpulseSeries<Scalar>& series, int q) {
  HEntries<Scalar> out;
  out.values = Vector<Scalar>::Zero(q);
  for (int i = 1; i <= q; ++i) {
    Scalar acc(0);
    for (int k = i; k <= series.truncation; ++k) acc += series(k) * series(k - i + 1);
    out.values(i - 1) = acc;
  }
  out.tail_estimate = series.sup_bound() * series.tail_bound;
  return out;
}

/// The limiting matrix
///
///   L = [ I_p  K^T ]
///       [ K    H   ]
///
/// with H(i, j) = h_{|i-j|+1} and the q x p block K(j, i) = p_{i-j} for i > j,
/// zero otherwise (0-based i over outputs, j over inputs). K has a zero first
/// column, and zero rows j >= p - 1 when p <= q.
template <typename Scalar>
class LimitMatrix {
 public:
  LimitMatrix(int p, int q, Matrix<Scalar> entries, Scalar tail_estimate, int truncation)
      : p_(p), q_(q), entries_(std::move(entries)), tail_estimate_(tail_estimate),
        truncation_(truncation) {}

  int p() const { return p_; }
  int q() const { return q_; }
  int dim() const { return p_ + q_; }
  const Matrix<Scalar>& entries() const { return entries_; }
  Scalar operator()(int i, int j) const { return entries_(i, j); }
  auto identity_block() const { return entries_.topLeftCorner(p_, p_); }
  auto cross_block() const { return entries_.bottomLeftCorner(q_, p_); }
  auto gram_block() const { return entries_.bottomRightCorner(q_, q_); }
  Scalar tail_estimate() const { return tail_estimate_; }
  int truncation() const { return truncation_; }

  Scalar min_eigenvalue() const {
    return Eigen::SelfAdjointEigenSolver<Matrix<Scalar>>(entries_, Eigen::EigenvaluesOnly)
        .eigenvalues()
        .minCoeff();
  }

  /// Covariance of the Gaussian limit of sqrt(k)(theta_hat_k - theta).
  Matrix<Scalar> inverse() const {
    return entries_.ldlt().solve(Matrix<Scalar>::Identity(dim(), dim()));
  }

 private:
  int p_;
  int q_;
  Matrix<Scalar> entries_;
  Scalar tail_estimate_;
  int truncation_;
};

/// Assembles L from an already computed series; throws NumericalError if the
/// result is not positive definite.
template <typename Scalar>
LimitMatrix<Scalar> assemble_limit_matrix(const ArxModel<Scalar>& model,
                                          const ImpulseSeries<Scalar>& series) {
  const int p = model.p();
  const int q = model.q();
  const auto h = h_entries(series, q);

  Matrix<Scalar> L = Matrix<Scalar>::Zero(p + q, p + q);
  L.topLeftCorner(p, p).setIdentity();
  for (int j = 0; j < q; ++j) {
    for (int i = j + 1; i < p; ++i) {
      L(p + j, i) = series(i - j);
      L(i, p + j) = series(i - j);
    }
    for (int jj = 0; jj < q; ++jj) L(p + j, p + jj) = h.values(std::abs(j - jj));
  }

  LimitMatrix<Scalar> out(p, q, std::move(L), h.tail_estimate, series.truncation);
  const Scalar scale = std::max(Scalar(1), out.entries().cwiseAbs().maxCoeff());
  const Scalar lambda_min = out.min_eigenvalue();
  if (!(lambda_min > Scalar(1e-10) * scale))
    throw NumericalError("limit matrix is not positive definite (min eigenvalue " +
                         std::to_string(static_cast<double>(lambda_min)) + ")");
  return out;
}

template <typename Scalar>
LimitMatrix<Scalar> build_limit_matrix(const ArxModel<Scalar>& model,
                                       Scalar rel_tol = Scalar(1e-12)) {
  validate(model);
  return assemble_limit_matrix(model, impulse_coefficients(model, rel_tol));
}

using ArxModeld = ArxModel<double>;
using LimitMatrixd = LimitMatrix<double>;

/// The ARX(2,2) example: A(z) = 1 + 6/5 z - 1/2 z^2, B(z) = 1 + 2/5 z + 1/4 z^2.
inline ArxModeld reference_model() {
  Eigen::VectorXd a(2), b(2);
  a << -1.2, 0.5;
  b << 0.4, 0.25;
  return ArxModeld(a, b);
}

}  // namespace arx
