#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "arx/model.hpp"
#include "arx/noise.hpp"
#include "arx/rls.hpp"

namespace arx {

/// Deterministic (hence predictable) reference trajectory.
///   kZero:     x_k = 0
///   kConstant: x_k = amplitude
///   kPower:    x_k = amplitude * k^exponent for k >= 1, x_0 = 0
///   kSine:     x_k = amplitude * k^exponent * sin(frequency * k)
struct ReferenceSpec {
  enum class Kind { kZero, kConstant, kPower, kSine };
  Kind kind = Kind::kZero;
  double amplitude = 0.0;
  double exponent = 0.0;
  double frequency = 0.0;

  static ReferenceSpec zero() { return {}; }
  static ReferenceSpec constant(double c) { return {Kind::kConstant, c, 0.0, 0.0}; }
  static ReferenceSpec power(double c, double e) { return {Kind::kPower, c, e, 0.0}; }
  static ReferenceSpec sine(double c, double e, double w) { return {Kind::kSine, c, e, w}; }

  double operator()(long k) const;
};

std::string to_string(ReferenceSpec::Kind kind);
ReferenceSpec::Kind parse_reference_kind(const std::string& name);

struct ReferenceDiagnostic {
  double mean_square = 0.0;       ///< (1/n) sum_{k=1}^n x_k^2
  double mean_square_half = 0.0;  ///< same over the first n/2 steps
  bool flagged = false;           ///< mean square not decaying: looks like Theta(n) energy
};

/// Advisory check of sum x_k^2 = o(n): flags a horizon whose mean square is
/// non-negligible and has not dropped below 0.9 of its value at n/2.
ReferenceDiagnostic reference_check(const ReferenceSpec& reference, long n);

/// One closed-loop run of length n. Index k runs over 0..n in every array.
/// X_0 = 0 and eps_0 = 0; U_k, pi_k are recorded for k = 0..n, the last pair
/// computed from the final estimate without being applied.
struct Trajectory {
  int p = 0;
  int q = 0;
  long n = 0;
  Eigen::VectorXd X;
  Eigen::VectorXd U;
  Eigen::VectorXd eps;
  Eigen::VectorXd x;          ///< reference x_k
  Eigen::VectorXd pi;         ///< (theta - theta_hat_k)^T Phi_k
  Eigen::MatrixXd theta_hat;  ///< column k holds theta_hat_k

  int dim() const { return p + q; }
  /// Phi_k = (X_k, ..., X_{k-p+1}, U_{k-1}, ..., U_{k-q}), zero before time 0.
  Eigen::VectorXd regressor(long k) const;
  double tracking_error(long k) const { return X(k) - x(k); }
  /// S_k = sum_{j=0}^k Phi_j Phi_j^T + I, dense recomputation.
  Eigen::MatrixXd gram(long k) const;
};

struct SimulationOptions {
  std::optional<Eigen::VectorXd> theta_hat_0;  ///< defaults to zero
  double overflow_guard = 1e12;
  long refactor_interval = 4096;
};

/// Runs the adaptive tracking loop: for k = 0..n-1 build Phi_k, apply
/// U_k = x_{k+1} - theta_hat_k^T Phi_k, draw eps_{k+1}, form
/// X_{k+1} = theta^T Phi_k + U_k + eps_{k+1}, then update the estimator.
/// Deterministic in (model, noise, reference, n, seed). Throws
/// NumericalError when |X| exceeds the overflow guard.
Trajectory simulate(const ArxModeld& model, const NoiseModel& noise,
                    const ReferenceSpec& reference, long n, std::uint64_t seed,
                    const SimulationOptions& options = {});

/// Columns k, x_k, X_k, U_k, eps_k, pi_k, theta_hat_1..theta_hat_delta with a
/// header row; values printed with 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, char delimiter = ',');

}  // namespace arx
