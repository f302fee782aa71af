#include "arx/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "arx/errors.hpp"

namespace arx {

double ReferenceSpec::operator()(long k) const {
  switch (kind) {
    case Kind::kZero: return 0.0;
    case Kind::kConstant: return amplitude;
    case Kind::kPower:
      return k >= 1 ? amplitude * std::pow(static_cast<double>(k), exponent) : 0.0;
    case Kind::kSine:
      return k >= 1 ? amplitude * std::pow(static_cast<double>(k), exponent) *
                          std::sin(frequency * static_cast<double>(k))
                    : 0.0;
  }
  return 0.0;
}

std::string to_string(ReferenceSpec::Kind kind) {
  switch (kind) {
    case ReferenceSpec::Kind::kZero: return "zero";
    case ReferenceSpec::Kind::kConstant: return "constant";
    case ReferenceSpec::Kind::kPower: return "power";
    case ReferenceSpec::Kind::kSine: return "sine";
  }
  return "unknown";
}

ReferenceSpec::Kind parse_reference_kind(const std::string& name) {
  if (name == "zero") return ReferenceSpec::Kind::kZero;
  if (name == "constant") return ReferenceSpec::Kind::kConstant;
  if (name == "power") return ReferenceSpec::Kind::kPower;
  if (name == "sine") return ReferenceSpec::Kind::kSine;
  throw ValidationError("unknown reference kind '" + name + "'");
}

ReferenceDiagnostic reference_check(const ReferenceSpec& reference, long n) {
  ReferenceDiagnostic d;
  if (n < 1) return d;
  const long half = std::max(1L, n / 2);
  double sum = 0.0;
  for (long k = 1; k <= n; ++k) {
    const double v = reference(k);
    sum += v * v;
    if (k == half) d.mean_square_half = sum / static_cast<double>(half);
  }
  d.mean_square = sum / static_cast<double>(n);
  d.flagged = d.mean_square > 1e-12 && d.mean_square > 0.9 * d.mean_square_half;
  return d;
}

Eigen::VectorXd Trajectory::regressor(long k) const {
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(dim());
  for (int i = 0; i < p; ++i)
    if (k - i >= 0) phi(i) = X(k - i);
  for (int j = 0; j < q; ++j)
    if (k - 1 - j >= 0) phi(p + j) = U(k - 1 - j);
  return phi;
}

Eigen::MatrixXd Trajectory::gram(long k) const {
  Eigen::MatrixXd S = Eigen::MatrixXd::Identity(dim(), dim());
  for (long j = 0; j <= k; ++j) {
    const Eigen::VectorXd phi = regressor(j);
    S.noalias() += phi * phi.transpose();
  }
  return S;
}

Trajectory simulate(const ArxModeld& model, const NoiseModel& noise,
                    const ReferenceSpec& reference, long n, std::uint64_t seed,
                    const SimulationOptions& options) {
  if (n < 1) throw ValidationError("simulation horizon must be >= 1");
  validate(model);
  const int p = model.p();
  const int q = model.q();
  const int dim = p + q;
  const Eigen::VectorXd theta = model.theta();

  Eigen::VectorXd theta0 = options.theta_hat_0.value_or(Eigen::VectorXd::Zero(dim));
  auto state = init_state<double>(dim, std::move(theta0));
  state.refactor_interval = options.refactor_interval;

  Trajectory t;
  t.p = p;
  t.q = q;
  t.n = n;
  t.X = Eigen::VectorXd::Zero(n + 1);
  t.U = Eigen::VectorXd::Zero(n + 1);
  t.eps = Eigen::VectorXd::Zero(n + 1);
  t.x = Eigen::VectorXd::Zero(n + 1);
  t.pi = Eigen::VectorXd::Zero(n + 1);
  t.theta_hat.resize(dim, n + 1);
  for (long k = 0; k <= n; ++k) t.x(k) = reference(k);

  RngStream rng(seed);
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(dim);
  auto fill_regressor = [&](long k) {
    for (int i = 0; i < p; ++i) phi(i) = k - i >= 0 ? t.X(k - i) : 0.0;
    for (int j = 0; j < q; ++j) phi(p + j) = k - 1 - j >= 0 ? t.U(k - 1 - j) : 0.0;
  };

  for (long k = 0; k < n; ++k) {
    fill_regressor(k);
    t.theta_hat.col(k) = state.theta_hat;
    const double u = control(state.theta_hat, phi, t.x(k + 1));
    t.U(k) = u;
    t.pi(k) = (theta - state.theta_hat).dot(phi);
    const double e = noise.sample(rng);
    const double x_next = theta.dot(phi) + u + e;
    if (!(std::abs(x_next) <= options.overflow_guard))
      throw NumericalError("overflow guard tripped at step " + std::to_string(k + 1) +
                           ": |X| exceeds " + std::to_string(options.overflow_guard));
    t.eps(k + 1) = e;
    t.X(k + 1) = x_next;
    rls_update(state, phi, x_next, u);
  }
  fill_regressor(n);
  t.theta_hat.col(n) = state.theta_hat;
  t.U(n) = control(state.theta_hat, phi, reference(n + 1));
  t.pi(n) = (theta - state.theta_hat).dot(phi);
  return t;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& t, char d) {
  out << 'k' << d << "x_k" << d << "X_k" << d << "U_k" << d << "eps_k" << d << "pi_k";
  for (int i = 1; i <= t.dim(); ++i) out << d << "theta_hat_" << i;
  out << '\n';
  char buf[40];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  };
  for (long k = 0; k <= t.n; ++k) {
    out << k;
    out << d << num(t.x(k));
    out << d << num(t.X(k));
    out << d << num(t.U(k));
    out << d << num(t.eps(k));
    out << d << num(t.pi(k));
    for (int i = 0; i < t.dim(); ++i) out << d << num(t.theta_hat(i, k));
    out << '\n';
  }
}

}  // namespace arx
