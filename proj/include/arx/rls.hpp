#pragma once

#include <optional>

#include <Eigen/Dense>

#include "arx/errors.hpp"
#include "arx/model.hpp"

namespace arx {

/// Least squares estimator for the tracking loop.
///
/// At index n the state holds theta_hat_n and the inverse of
/// S_{n-1} = sum_{k=0}^{n-1} Phi_k Phi_k^T + I, so a fresh state (n = 0)
/// has S_{-1} = I. When the true parameter is supplied, the martingale
/// M_n = (theta_hat_0 - theta) + sum_{k=1}^n Phi_{k-1} eps_k is carried as
/// well; it satisfies theta_hat_n - theta = S_{n-1}^{-1} M_n.
template <typename Scalar>
struct EstimatorState {
  Vector<Scalar> theta_hat;
  Matrix<Scalar> S_inv;
  Matrix<Scalar> S;  ///< running S_{n-1}, used for periodic refactorization
  std::optional<Vector<Scalar>> theta_true;
  Vector<Scalar> M;  ///< empty unless theta_true is set
  long n = 0;
  /// Refactor S_inv from S every this many updates; 0 disables.
  long refactor_interval = 4096;
  Vector<Scalar> work;  ///< scratch for S_inv * Phi

  int dim() const { return static_cast<int>(theta_hat.size()); }
};

template <typename Scalar>
EstimatorState<Scalar> init_state(int dim, Vector<Scalar> theta_hat_0,
                                  std::optional<Vector<Scalar>> theta_true = std::nullopt) {
  if (theta_hat_0.size() != dim) throw ValidationError("theta_hat_0 has the wrong dimension");
  if (theta_true && theta_true->size() != dim)
    throw ValidationError("true theta has the wrong dimension");
  EstimatorState<Scalar> s;
  s.theta_hat = std::move(theta_hat_0);
  s.S_inv = Matrix<Scalar>::Identity(dim, dim);
  s.S = Matrix<Scalar>::Identity(dim, dim);
  if (theta_true) {
    s.M = s.theta_hat - *theta_true;
    s.theta_true = std::move(theta_true);
  }
  return s;
}

template <typename Scalar>
EstimatorState<Scalar> init_state(const ArxModel<Scalar>& model, Vector<Scalar> theta_hat_0,
                                  bool track_martingale = false) {
  return init_state<Scalar>(model.dim(), std::move(theta_hat_0),
                            track_martingale ? std::optional(model.theta()) : std::nullopt);
}

/// Certainty-equivalence tracking input U_n = x_{n+1} - theta_hat_n^T Phi_n.
template <typename DerivedT, typename DerivedP>
typename DerivedT::Scalar control(const Eigen::MatrixBase<DerivedT>& theta_hat,
                                  const Eigen::MatrixBase<DerivedP>& phi,
                                  typename DerivedT::Scalar x_next) {
  return x_next - theta_hat.dot(phi);
}

/// In-place version of rls_step.
template <typename Scalar, typename Derived>
void rls_update(EstimatorState<Scalar>& s, const Eigen::MatrixBase<Derived>& phi, Scalar x_obs,
                Scalar u) {
  const Scalar innovation = x_obs - u - s.theta_hat.dot(phi);

  // Sherman-Morrison: (S + phi phi^T)^-1 = S^-1 - v v^T / (1 + phi^T v), v = S^-1 phi.
  // Entries are written pairwise so S_inv stays exactly symmetric.
  auto& v = s.work;
  v.noalias() = s.S_inv * phi;
  const Scalar denom = Scalar(1) + phi.dot(v);
  if (!(denom > Scalar(1e-12)))
    throw NumericalError("rank-one update denominator is not positive; S_inv is corrupted");
  const int d = s.dim();
  for (int j = 0; j < d; ++j)
    for (int i = 0; i <= j; ++i) {
      const Scalar vv = v(i) * v(j);
      s.S_inv(i, j) -= vv / denom;
      s.S_inv(j, i) = s.S_inv(i, j);
      s.S(i, j) += phi(i) * phi(j);
      s.S(j, i) = s.S(i, j);
    }

  if (s.theta_true) s.M += phi * (x_obs - u - s.theta_true->dot(phi));
  ++s.n;

  if (s.refactor_interval > 0 && s.n % s.refactor_interval == 0) {
    s.S_inv = s.S.ldlt().solve(Matrix<Scalar>::Identity(d, d));
    s.S_inv = (Scalar(0.5) * (s.S_inv + s.S_inv.transpose())).eval();
  }

  v.noalias() = s.S_inv * phi;
  s.theta_hat.noalias() += innovation * v;
}

/// One least squares update after observing X_{n+1} under input U_n:
/// S_inv becomes S_n^{-1} by a rank-one update, then
/// theta_hat_{n+1} = theta_hat_n + S_n^{-1} Phi_n (X_{n+1} - U_n - theta_hat_n^T Phi_n),
/// with the innovation formed from the old estimate.
template <typename Scalar, typename Derived>
EstimatorState<Scalar> rls_step(EstimatorState<Scalar> s, const Eigen::MatrixBase<Derived>& phi,
                                Scalar x_obs, Scalar u) {
  rls_update(s, phi, x_obs, u);
  return s;
}

}  // namespace arx
