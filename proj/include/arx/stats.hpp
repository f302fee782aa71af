#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "arx/simulate.hpp"
#include "arx/test_functions.hpp"

namespace arx {

/// ell(m) = delta * prod_{k=1}^{m-1} (delta + 2k), exact for the sizes used.
double ell(int m, int delta);

/// d sigma^{2m} prod_{k=1}^{m-1} (d + 2k): E|Z|^{2m} for Z ~ N(0, sigma2 I_d).
double ell_martingale(int m, int d, double sigma2);

double relative_error(double value, double target);

struct MomentReport {
  int m = 0;
  double value = 0.0;
  double target = 0.0;
  double rel_error = 0.0;
};

/// Running (1/log n) sum_{k=1}^n w_k. Terms with k <= burn_in are skipped
/// but still advance k.
class LogAverageAccumulator {
 public:
  explicit LogAverageAccumulator(long burn_in = 0) : burn_in_(burn_in) {}

  void add(double term) {
    ++n_;
    if (n_ > burn_in_) sum_ += term;
  }
  long n() const { return n_; }
  double sum() const { return sum_; }
  /// Requires n >= 2.
  double value() const { return sum_ / std::log(static_cast<double>(n_)); }

 private:
  long burn_in_;
  long n_ = 0;
  double sum_ = 0.0;
};

struct LogAverageOptions {
  long burn_in = 0;
};

/// Statistics a replicate can report at each horizon.
enum class StatisticKind {
  kQsl,               ///< (1/log n) sum k^{m-1} ((theta_hat_k - theta)^T L (theta_hat_k - theta))^m
  kCost,              ///< C_n(m)
  kEstimationError,   ///< G_n(m) / log n
  kNoiseMoment,       ///< Gamma_n(m)
  kMartingaleMoment,  ///< (1/log n) sum (1/k) (M_k^T S_{k-1}^{-1} M_k)^m
  kQslGram,           ///< (1/log n) sum (1/k) ((theta_hat_k - theta)^T S_{k-1} (theta_hat_k - theta))^m
};

std::string to_string(StatisticKind kind);
StatisticKind parse_statistic_kind(const std::string& name);
bool needs_log_normalizer(StatisticKind kind);

struct StatisticRequest {
  StatisticKind kind;
  int m;
};

/// Walks one trajectory once and records every requested statistic at each
/// horizon (prefix snapshots). values[r][h] pairs requests[r] with horizons[h].
/// Horizons must be ascending and <= traj.n; log-normalized statistics need
/// horizons >= 2.
std::vector<std::vector<double>> evaluate_prefixes(const Trajectory& traj,
                                                   const Eigen::VectorXd& theta,
                                                   const Eigen::MatrixXd& L,
                                                   std::span<const StatisticRequest> requests,
                                                   std::span<const long> horizons,
                                                   const LogAverageOptions& options = {});

/// n = -1 means the full trajectory.
MomentReport qsl_statistic(const Trajectory& traj, const Eigen::MatrixXd& L,
                           const Eigen::VectorXd& theta, int m, long n = -1,
                           const LogAverageOptions& options = {});

double average_cost(const Trajectory& traj, int m, long n = -1);

struct EstimationErrorReport {
  double value = 0.0;    ///< G_n(m)
  double per_log = 0.0;  ///< G_n(m) / log n (NaN for n = 1)
};

EstimationErrorReport estimation_error(const Trajectory& traj, const Eigen::VectorXd& theta,
                                       int m, long n = -1);

double noise_moment_avg(const Trajectory& traj, int m, long n = -1);

struct AscltResult {
  double value = 0.0;
  double reference = 0.0;
  double gap = 0.0;  ///< value - reference
};

/// (1/log n) sum_{k=1}^n (1/k) h(sqrt(k) (theta_hat_k - theta)) against the
/// Gaussian mean attached to h.
AscltResult asclt_log_average(const Trajectory& traj, const Eigen::VectorXd& theta,
                              const TestFunction& h, long n = -1,
                              const LogAverageOptions& options = {});

/// Same, for a set of functions and ascending horizons in one pass;
/// result[f][h].
std::vector<std::vector<AscltResult>> asclt_log_average_prefixes(
    const Trajectory& traj, const Eigen::VectorXd& theta, std::span<const TestFunction> hs,
    std::span<const long> horizons, const LogAverageOptions& options = {});

/// (1/log n) sum_{k=1}^n (1/k) (M_k^T S_{k-1}^{-1} M_k)^m, where M[i] and
/// S[i] correspond to k = i + 1 (so S[i] is S_{k-1}).
double martingale_moment_statistic(std::span<const Eigen::VectorXd> M,
                                   std::span<const Eigen::MatrixXd> S, int m);

struct MartingaleSequence {
  std::vector<Eigen::VectorXd> M;  ///< M_1..M_n
  std::vector<Eigen::MatrixXd> S;  ///< S_0..S_{n-1}
};

/// M_k = (theta_hat_0 - theta) + sum_{j=1}^k Phi_{j-1} eps_j and S_{k-1}
/// recomputed from the recorded regressors.
MartingaleSequence martingale_sequence(const Trajectory& traj, const Eigen::VectorXd& theta,
                                       long n = -1);

/// (1/n) sum_{k=1}^n |dM_k|^2 1{|dM_k| >= eps sqrt(n)} for each eps,
/// dM_k = Phi_{k-1} eps_k.
std::vector<double> lindeberg_diagnostic(const Trajectory& traj, std::span<const double> eps_grid,
                                         long n = -1);

/// Least squares slope of log y against log x over the points with x, y > 0.
/// NaN with fewer than two usable points.
double log_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace arx
