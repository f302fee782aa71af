#include "arx/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "arx/errors.hpp"

namespace arx {

namespace {

double ipow(double base, int e) {
  double r = 1.0;
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

long resolve_horizon(const Trajectory& traj, long n) {
  if (n < 0) return traj.n;
  if (n > traj.n) throw ValidationError("horizon exceeds trajectory length");
  return n;
}

void require_order(int m) {
  if (m < 1) throw ValidationError("moment order m must be >= 1");
}

}  // namespace

double ell(int m, int delta) {
  if (m < 1 || delta < 1) throw ValidationError("ell requires m >= 1 and delta >= 1");
  double r = delta;
  for (int k = 1; k < m; ++k) r *= delta + 2 * k;
  return r;
}

double ell_martingale(int m, int d, double sigma2) { return ipow(sigma2, m) * ell(m, d); }

double relative_error(double value, double target) {
  return std::abs(value - target) / std::abs(target);
}

std::string to_string(StatisticKind kind) {
  switch (kind) {
    case StatisticKind::kQsl: return "qsl";
    case StatisticKind::kCost: return "cost";
    case StatisticKind::kEstimationError: return "estimation_error";
    case StatisticKind::kNoiseMoment: return "noise_moment";
    case StatisticKind::kMartingaleMoment: return "martingale_moment";
    case StatisticKind::kQslGram: return "qsl_gram";
  }
  return "unknown";
}

StatisticKind parse_statistic_kind(const std::string& name) {
  for (auto k : {StatisticKind::kQsl, StatisticKind::kCost, StatisticKind::kEstimationError,
                 StatisticKind::kNoiseMoment, StatisticKind::kMartingaleMoment,
                 StatisticKind::kQslGram})
    if (to_string(k) == name) return k;
  throw ValidationError("unknown statistic '" + name + "'");
}

bool needs_log_normalizer(StatisticKind kind) {
  return kind != StatisticKind::kCost && kind != StatisticKind::kNoiseMoment;
}

std::vector<std::vector<double>> evaluate_prefixes(const Trajectory& traj,
                                                   const Eigen::VectorXd& theta,
                                                   const Eigen::MatrixXd& L,
                                                   std::span<const StatisticRequest> requests,
                                                   std::span<const long> horizons,
                                                   const LogAverageOptions& options) {
  const int dim = traj.dim();
  if (theta.size() != dim) throw ValidationError("theta has the wrong dimension");
  if (!std::is_sorted(horizons.begin(), horizons.end()))
    throw ValidationError("horizons must be ascending");
  if (horizons.empty()) return std::vector<std::vector<double>>(requests.size());
  if (horizons.front() < 1 || horizons.back() > traj.n)
    throw ValidationError("horizons must lie in [1, trajectory length]");

  bool need_gram = false, need_quad_L = false;
  for (const auto& r : requests) {
    require_order(r.m);
    if (needs_log_normalizer(r.kind) && horizons.front() < 2)
      throw ValidationError(to_string(r.kind) + " needs horizons >= 2");
    need_gram |= r.kind == StatisticKind::kMartingaleMoment || r.kind == StatisticKind::kQslGram;
    need_quad_L |= r.kind == StatisticKind::kQsl;
  }
  if (need_quad_L && (L.rows() != dim || L.cols() != dim))
    throw ValidationError("limit matrix has the wrong dimension");

  std::vector<double> sums(requests.size(), 0.0);
  std::vector<std::vector<double>> out(requests.size(), std::vector<double>(horizons.size()));

  Eigen::VectorXd e(dim), phi(dim), M(dim), solved(dim);
  Eigen::MatrixXd S_prev = Eigen::MatrixXd::Identity(dim, dim);  // S_{k-1}
  Eigen::LDLT<Eigen::MatrixXd> ldlt(dim);
  if (need_gram) {
    M = traj.theta_hat.col(0) - theta;
    phi = traj.regressor(0);
    S_prev.noalias() += phi * phi.transpose();  // S_0
  }

  std::size_t next = 0;
  const long last = horizons.back();
  for (long k = 1; k <= last; ++k) {
    const double kd = static_cast<double>(k);
    e = traj.theta_hat.col(k) - theta;
    const double quad_L = need_quad_L ? e.dot(L * e) : 0.0;
    const double norm2 = e.squaredNorm();
    const double track = traj.tracking_error(k);
    double quad_M = 0.0, quad_S = 0.0;
    if (need_gram) {
      M.noalias() += traj.regressor(k - 1) * traj.eps(k);
      ldlt.compute(S_prev);
      solved = ldlt.solve(M);
      quad_M = M.dot(solved);
      quad_S = e.dot(S_prev * e);
    }
    const bool counted = k > options.burn_in;
    for (std::size_t r = 0; r < requests.size(); ++r) {
      const int m = requests[r].m;
      switch (requests[r].kind) {
        case StatisticKind::kQsl:
          if (counted) sums[r] += ipow(kd, m - 1) * ipow(quad_L, m);
          break;
        case StatisticKind::kCost: sums[r] += ipow(track * track, m); break;
        case StatisticKind::kEstimationError: sums[r] += ipow(kd, m - 1) * ipow(norm2, m); break;
        case StatisticKind::kNoiseMoment: sums[r] += ipow(traj.eps(k) * traj.eps(k), m); break;
        case StatisticKind::kMartingaleMoment:
          if (counted) sums[r] += ipow(quad_M, m) / kd;
          break;
        case StatisticKind::kQslGram:
          if (counted) sums[r] += ipow(quad_S, m) / kd;
          break;
      }
    }
    if (need_gram) {
      phi = traj.regressor(k);
      S_prev.noalias() += phi * phi.transpose();
    }
    while (next < horizons.size() && horizons[next] == k) {
      for (std::size_t r = 0; r < requests.size(); ++r)
        out[r][next] = sums[r] / (needs_log_normalizer(requests[r].kind) ? std::log(kd) : kd);
      ++next;
    }
  }
  return out;
}

MomentReport qsl_statistic(const Trajectory& traj, const Eigen::MatrixXd& L,
                           const Eigen::VectorXd& theta, int m, long n,
                           const LogAverageOptions& options) {
  n = resolve_horizon(traj, n);
  if (n < 2) throw ValidationError("quadratic strong law needs n >= 2");
  const StatisticRequest req{StatisticKind::kQsl, m};
  const double value = evaluate_prefixes(traj, theta, L, {&req, 1}, {&n, 1}, options)[0][0];
  const double target = ell(m, traj.dim());
  return {m, value, target, relative_error(value, target)};
}

double average_cost(const Trajectory& traj, int m, long n) {
  n = resolve_horizon(traj, n);
  if (n < 1) throw ValidationError("average cost needs n >= 1");
  const StatisticRequest req{StatisticKind::kCost, m};
  return evaluate_prefixes(traj, Eigen::VectorXd::Zero(traj.dim()), {}, {&req, 1}, {&n, 1})[0][0];
}

EstimationErrorReport estimation_error(const Trajectory& traj, const Eigen::VectorXd& theta,
                                       int m, long n) {
  n = resolve_horizon(traj, n);
  if (n < 1) throw ValidationError("estimation error needs n >= 1");
  require_order(m);
  if (theta.size() != traj.dim()) throw ValidationError("theta has the wrong dimension");
  double g = 0.0;
  for (long k = 1; k <= n; ++k)
    g += ipow(static_cast<double>(k), m - 1) *
         ipow((traj.theta_hat.col(k) - theta).squaredNorm(), m);
  const double per_log =
      n >= 2 ? g / std::log(static_cast<double>(n)) : std::numeric_limits<double>::quiet_NaN();
  return {g, per_log};
}

double noise_moment_avg(const Trajectory& traj, int m, long n) {
  n = resolve_horizon(traj, n);
  if (n < 1) throw ValidationError("noise moment needs n >= 1");
  const StatisticRequest req{StatisticKind::kNoiseMoment, m};
  return evaluate_prefixes(traj, Eigen::VectorXd::Zero(traj.dim()), {}, {&req, 1}, {&n, 1})[0][0];
}

std::vector<std::vector<AscltResult>> asclt_log_average_prefixes(
    const Trajectory& traj, const Eigen::VectorXd& theta, std::span<const TestFunction> hs,
    std::span<const long> horizons, const LogAverageOptions& options) {
  if (theta.size() != traj.dim()) throw ValidationError("theta has the wrong dimension");
  for (const auto& h : hs)
    if (!h.gaussian_mean)
      throw ValidationError("test function '" + h.name + "' has no reference value");
  if (!std::is_sorted(horizons.begin(), horizons.end()))
    throw ValidationError("horizons must be ascending");
  std::vector<std::vector<AscltResult>> out(hs.size(),
                                            std::vector<AscltResult>(horizons.size()));
  if (horizons.empty()) return out;
  if (horizons.front() < 2 || horizons.back() > traj.n)
    throw ValidationError("ASCLT horizons must lie in [2, trajectory length]");

  std::vector<LogAverageAccumulator> acc(hs.size(), LogAverageAccumulator(options.burn_in));
  Eigen::VectorXd z(traj.dim());
  std::size_t next = 0;
  for (long k = 1; k <= horizons.back(); ++k) {
    const double kd = static_cast<double>(k);
    z = std::sqrt(kd) * (traj.theta_hat.col(k) - theta);
    for (std::size_t f = 0; f < hs.size(); ++f) acc[f].add(hs[f](z) / kd);
    while (next < horizons.size() && horizons[next] == k) {
      for (std::size_t f = 0; f < hs.size(); ++f) {
        const double ref = *hs[f].gaussian_mean;
        const double v = acc[f].value();
        out[f][next] = {v, ref, v - ref};
      }
      ++next;
    }
  }
  return out;
}

AscltResult asclt_log_average(const Trajectory& traj, const Eigen::VectorXd& theta,
                              const TestFunction& h, long n, const LogAverageOptions& options) {
  n = resolve_horizon(traj, n);
  return asclt_log_average_prefixes(traj, theta, {&h, 1}, {&n, 1}, options)[0][0];
}

double martingale_moment_statistic(std::span<const Eigen::VectorXd> M,
                                   std::span<const Eigen::MatrixXd> S, int m) {
  require_order(m);
  if (M.size() != S.size()) throw ValidationError("martingale and Gram sequences misaligned");
  if (M.size() < 2) throw ValidationError("martingale statistic needs n >= 2");
  double sum = 0.0;
  for (std::size_t i = 0; i < M.size(); ++i) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(S[i]);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0))
      throw NumericalError("singular Gram matrix at k = " + std::to_string(i + 1));
    const double quad = M[i].dot(ldlt.solve(M[i]));
    sum += ipow(quad, m) / static_cast<double>(i + 1);
  }
  return sum / std::log(static_cast<double>(M.size()));
}

MartingaleSequence martingale_sequence(const Trajectory& traj, const Eigen::VectorXd& theta,
                                       long n) {
  n = resolve_horizon(traj, n);
  const int dim = traj.dim();
  MartingaleSequence seq;
  seq.M.reserve(n);
  seq.S.reserve(n);
  Eigen::VectorXd M = traj.theta_hat.col(0) - theta;
  Eigen::MatrixXd S = Eigen::MatrixXd::Identity(dim, dim);
  for (long k = 1; k <= n; ++k) {
    const Eigen::VectorXd phi = traj.regressor(k - 1);
    S.noalias() += phi * phi.transpose();
    M.noalias() += phi * traj.eps(k);
    seq.M.push_back(M);
    seq.S.push_back(S);
  }
  return seq;
}

std::vector<double> lindeberg_diagnostic(const Trajectory& traj, std::span<const double> eps_grid,
                                         long n) {
  n = resolve_horizon(traj, n);
  if (n < 1) throw ValidationError("Lindeberg diagnostic needs n >= 1");
  const double root_n = std::sqrt(static_cast<double>(n));
  std::vector<double> out(eps_grid.size(), 0.0);
  for (long k = 1; k <= n; ++k) {
    const double norm2 = traj.regressor(k - 1).squaredNorm() * traj.eps(k) * traj.eps(k);
    const double norm = std::sqrt(norm2);
    for (std::size_t g = 0; g < eps_grid.size(); ++g)
      if (norm >= eps_grid[g] * root_n) out[g] += norm2;
  }
  for (double& v : out) v /= static_cast<double>(n);
  return out;
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  if (count < 2) return std::numeric_limits<double>::quiet_NaN();
  const double denom = count * sxx - sx * sx;
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (count * sxy - sx * sy) / denom;
}

}  // namespace arx
