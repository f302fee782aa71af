#include <doctest.h>

#include <chrono>
#include <cmath>
#include <limits>

#include "arx/model.hpp"
#include "test_support.hpp"

using namespace arx;

namespace {

ArxModeld make(std::initializer_list<double> a, std::initializer_list<double> b) {
  Eigen::VectorXd av(a.size()), bv(b.size());
  int i = 0;
  for (double v : a) av(i++) = v;
  i = 0;
  for (double v : b) bv(i++) = v;
  return ArxModeld(av, bv);
}

// Independent route to p_k: expand 1/B(z) = sum beta_k z^k, then multiply by
// A(z) - 1 = -sum a_i z^i.
Eigen::VectorXd impulse_by_series_inverse(const ArxModeld& m, int K) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(K + 1);
  beta(0) = 1.0;
  for (int k = 1; k <= K; ++k)
    for (int j = 1; j <= std::min(k, m.q()); ++j) beta(k) -= m.b()(j - 1) * beta(k - j);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(K);
  for (int k = 1; k <= K; ++k)
    for (int i = 1; i <= std::min(k, m.p()); ++i) p(k - 1) -= m.a()(i - 1) * beta(k - i);
  return p;
}

}  // namespace

TEST_CASE("ArxModel stores theta and reconstructs signed polynomials") {
  const auto m = reference_model();
  CHECK(m.p() == 2);
  CHECK(m.q() == 2);
  Eigen::VectorXd theta(4);
  theta << -1.2, 0.5, 0.4, 0.25;
  CHECK(m.theta() == theta);
  // A(z) = 1 + 6/5 z - 1/2 z^2
  CHECK(m.A()[0] == 1.0);
  CHECK(m.A()[1] == 1.2);
  CHECK(m.A()[2] == -0.5);
  CHECK(m.B()[1] == 0.4);
  CHECK(m.B()[2] == 0.25);
  CHECK_THROWS_AS(ArxModeld(Eigen::VectorXd(0), Eigen::VectorXd::Ones(1)), ValidationError);
}

TEST_CASE("check_causality") {
  SUBCASE("reference B has complex zeros of modulus 2") {
    const auto c = check_causality(reference_model().B());
    CHECK(c.is_causal);
    CHECK(c.min_root_modulus == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("B = 1 is trivially causal") {
    const auto c = check_causality(Polynomial<double>{1.0});
    CHECK(c.is_causal);
    CHECK(std::isinf(c.min_root_modulus));
  }
  SUBCASE("B = 1 - 2z has a zero at 1/2") {
    const auto c = check_causality(Polynomial<double>{1.0, -2.0});
    CHECK_FALSE(c.is_causal);
    CHECK(c.min_root_modulus == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("zero on the unit circle is not causal") {
    CHECK_FALSE(check_causality(Polynomial<double>{1.0, 1.0}).is_causal);
  }
  SUBCASE("constant term must be one") {
    CHECK_THROWS_AS(check_causality(Polynomial<double>{2.0, 1.0}), ValidationError);
  }
}

TEST_CASE("check_controllability") {
  SUBCASE("reference model is controllable") {
    const auto m = reference_model();
    CHECK(is_controllable(m.A(), m.B()));
  }
  SUBCASE("A - 1 = -z(1 + z) against B = 1 + z + z^2: no common root") {
    // Zeros {0, -1} versus the primitive cube roots of unity.
    CHECK(is_controllable(Polynomial<double>{1.0, -1.0, -1.0}, Polynomial<double>{1.0, 1.0, 1.0}));
  }
  SUBCASE("A - 1 = z B shares every zero of B") {
    const auto c = check_controllability(Polynomial<double>{1.0, 1.0, 0.4, 0.25},
                                         Polynomial<double>{1.0, 0.4, 0.25});
    CHECK(c.status == ControllabilityStatus::kCommonRoot);
    CHECK(std::abs(c.resultant) <= c.threshold);
  }
  SUBCASE("A = 1 is reported separately") {
    const auto c = check_controllability(Polynomial<double>{1.0}, Polynomial<double>{1.0, 0.5});
    CHECK(c.status == ControllabilityStatus::kDegenerateA);
    CHECK_FALSE(c.controllable());
  }
  SUBCASE("resultant decision is scale invariant") {
    // Same shared root, coefficients scaled by 1e3.
    const auto c = check_controllability(Polynomial<double>{1.0, 1e3, 1.0e3 * 0.5},
                                         Polynomial<double>{1.0, 0.5});
    // A - 1 = 1e3 z (1 + 0.5 z) shares z = -2 with B.
    CHECK(c.status == ControllabilityStatus::kCommonRoot);
  }
}

TEST_CASE("validate names the failed check") {
  CHECK_THROWS_WITH_AS(validate(make({0.5}, {-2.0})), doctest::Contains("causality"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(validate(make({0.0}, {0.4, 0.25})), doctest::Contains("controllability"),
                       ValidationError);
  CHECK_NOTHROW(validate(reference_model()));
}

TEST_CASE("impulse coefficients of the reference model") {
  const auto s = impulse_coefficients(reference_model(), 1e-12);
  CHECK(s(1) == doctest::Approx(1.2).epsilon(1e-14));
  CHECK(s(2) == doctest::Approx(-0.98).epsilon(1e-14));
  CHECK(s(3) == doctest::Approx(0.092).epsilon(1e-12));
  CHECK(s(4) == doctest::Approx(0.2082).epsilon(1e-12));
  CHECK(s.truncation >= 4);
  CHECK(s.tail_bound < 1e-12 * (1.0 + s.coeffs.cwiseAbs().sum()));
}

TEST_CASE("impulse coefficients agree with the series-inverse oracle") {
  RngStream rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = test::random_validated_model(rng, 4, 4);
    const auto s = impulse_coefficients(m, 1e-10);
    const Eigen::VectorXd oracle = impulse_by_series_inverse(m, s.truncation);
    const double scale = 1.0 + oracle.cwiseAbs().maxCoeff();
    CHECK((s.coeffs - oracle).cwiseAbs().maxCoeff() <= 1e-12 * scale);
  }
}

TEST_CASE("B(z) P_K(z) reproduces A(z) - 1 up to order K") {
  RngStream rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = test::random_validated_model(rng, 4, 4);
    const auto s = impulse_coefficients(m, 1e-10);
    Polynomial<double> P(
        (Eigen::VectorXd(s.truncation + 1) << 0.0, s.coeffs).finished());
    const auto prod = m.B() * P;
    const auto target = m.A() - 1.0;
    const double scale = 1.0 + m.a().cwiseAbs().maxCoeff();
    for (int k = 1; k <= s.truncation; ++k) {
      const double residual = std::abs(prod[k] - target[k]);
      CHECK(residual <= 1e-12 * scale * (1.0 + s.coeffs.cwiseAbs().maxCoeff()));
    }
    // Orders past K come only from the truncated tail, bounded by tail_bound * |B|_1.
    for (int k = s.truncation + 1; k <= s.truncation + m.q(); ++k)
      CHECK(std::abs(prod[k]) <= s.sup_bound() * m.B().coeffs().cwiseAbs().sum());
  }
}

TEST_CASE("tail bound dominates the true tail and decays geometrically") {
  const auto m = reference_model();
  const auto long_series = impulse_coefficients_truncated(m, 400);
  for (int K : {10, 20, 40, 80}) {
    const auto s = impulse_coefficients_truncated(m, K);
    double tail = 0.0;
    for (int k = K + 1; k <= 400; ++k) tail += std::abs(long_series(k));
    CHECK(tail <= s.tail_bound);
    const auto s2 = impulse_coefficients_truncated(m, K + 1);
    CHECK(s2.tail_bound == doctest::Approx(s.tail_bound / s.envelope_radius).epsilon(1e-12));
  }
  CHECK(long_series.envelope_radius > 1.0);
  CHECK(long_series.envelope_radius < long_series.min_root_modulus);
}

TEST_CASE("impulse special cases") {
  SUBCASE("A = 1 gives the zero series") {
    const auto s = impulse_coefficients_truncated(make({0.0}, {0.5}), 10);
    CHECK(s.coeffs.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("first-order model is geometric") {
    // A(z) - 1 = -a_1 z, so P(z) = -a_1 z / (1 + b_1 z) and p_k = -a_1 (-b_1)^{k-1}.
    const double a1 = 0.7, b1 = -0.6;
    const auto s = impulse_coefficients_truncated(make({a1}, {b1}), 10);
    for (int k = 1; k <= 10; ++k)
      CHECK(s(k) == doctest::Approx(-a1 * std::pow(-b1, k - 1)).epsilon(1e-13));
  }
  SUBCASE("non-causal model is rejected") {
    CHECK_THROWS_AS(impulse_coefficients(make({0.5}, {-2.0}), 1e-8), ValidationError);
  }
  SUBCASE("rel_tol outside (0, 1)") {
    CHECK_THROWS_AS(impulse_coefficients(reference_model(), 0.0), ValidationError);
    CHECK_THROWS_AS(impulse_coefficients(reference_model(), 1.0), ValidationError);
  }
}

TEST_CASE("h entries") {
  SUBCASE("reference model") {
    const auto s = impulse_coefficients(reference_model(), 1e-12);
    const auto h = h_entries(s, 2);
    CHECK(h.values(0) == doctest::Approx(244.0 / 99.0).epsilon(1e-11));
    CHECK(h.values(1) == doctest::Approx(-628.0 / 495.0).epsilon(1e-11));
    CHECK(h.tail_estimate < 1e-10);
  }
  SUBCASE("zero series") {
    ImpulseSeries<double> s;
    s.coeffs = Eigen::VectorXd::Zero(5);
    s.truncation = 5;
    const auto h = h_entries(s, 3);
    CHECK(h.values.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("a single nonzero coefficient") {
    ImpulseSeries<double> s;
    s.coeffs = Eigen::VectorXd::Zero(6);
    s.coeffs(0) = 1.7;
    s.truncation = 6;
    const auto h = h_entries(s, 3);
    CHECK(h.values(0) == doctest::Approx(1.7 * 1.7));
    CHECK(h.values(1) == 0.0);
    CHECK(h.values(2) == 0.0);
  }
}

TEST_CASE("limit matrix of the reference model") {
  const auto L = build_limit_matrix(reference_model(), 1e-12);
  Eigen::Matrix4d expected;
  expected << 1, 0, 0, 0,
              0, 1, 6.0 / 5.0, 0,
              0, 6.0 / 5.0, 244.0 / 99.0, -628.0 / 495.0,
              0, 0, -628.0 / 495.0, 244.0 / 99.0;
  CHECK((L.entries() - expected).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(L.entries() == L.entries().transpose());
  CHECK(L.identity_block() == Eigen::Matrix2d::Identity());
  CHECK(L.min_eigenvalue() > 0.0);
}

TEST_CASE("limit matrix special cases") {
  SUBCASE("first-order model: L = diag(1, a_1^2 / (1 - b_1^2))") {
    const auto L = build_limit_matrix(make({0.5}, {0.5}), 1e-12);
    // Oracle: 200-term truncation of sum p_k^2 with p_k = -0.5 (-0.5)^{k-1}.
    double h1 = 0.0;
    for (int k = 1; k <= 200; ++k) h1 += std::pow(0.5 * std::pow(-0.5, k - 1), 2);
    CHECK(L(0, 0) == 1.0);
    CHECK(L(0, 1) == 0.0);
    CHECK(L(1, 0) == 0.0);
    CHECK(L(1, 1) == doctest::Approx(h1).epsilon(1e-12));
    CHECK(L(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("A = 1 is rejected before assembly") {
    CHECK_THROWS_AS(build_limit_matrix(make({0.0}, {0.3}), 1e-12), ValidationError);
  }
}

TEST_CASE("K block layout for p > q and p < q") {
  SUBCASE("p = 4, q = 2") {
    const auto m = make({0.3, -0.2, 0.1, 0.05}, {0.4, 0.1});
    const auto s = impulse_coefficients(m, 1e-12);
    const auto L = build_limit_matrix(m, 1e-12);
    Eigen::MatrixXd K(2, 4);
    K << 0, s(1), s(2), s(3),
         0, 0, s(1), s(2);
    CHECK(L.cross_block() == K);
    CHECK(L.entries().topRightCorner(4, 2) == K.transpose());
  }
  SUBCASE("p = 2, q = 4: zero rows below p - 1") {
    const auto m = make({0.3, -0.2}, {0.4, 0.1, 0.05, 0.02});
    const auto s = impulse_coefficients(m, 1e-12);
    const auto L = build_limit_matrix(m, 1e-12);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(4, 2);
    K(0, 1) = s(1);
    CHECK(L.cross_block() == K);
    const auto h = h_entries(s, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(L.gram_block()(i, j) == h.values(std::abs(i - j)));
  }
  SUBCASE("p = 1: K is all zeros") {
    const auto L = build_limit_matrix(make({0.8}, {0.4, 0.1}), 1e-12);
    CHECK(L.cross_block().cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("random validated models give symmetric positive definite L") {
  RngStream rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = test::random_validated_model(rng, 4, 4);
    const auto L = build_limit_matrix(m, 1e-12);
    CHECK(L.entries() == L.entries().transpose());
    CHECK(L.min_eigenvalue() > 0.0);
    CHECK(L.identity_block() == Eigen::MatrixXd::Identity(m.p(), m.p()));
    for (int i = 0; i < m.q(); ++i)
      for (int j = 0; j < m.q(); ++j)
        CHECK(L.gram_block()(i, j) == L.gram_block()(0, std::abs(i - j)));
  }
}

TEST_CASE("doubling the truncation moves L by less than the tail estimate") {
  RngStream rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = test::random_validated_model(rng, 4, 4);
    const auto s = impulse_coefficients(m, 1e-8);
    const auto L1 = assemble_limit_matrix(m, s);
    const auto L2 = assemble_limit_matrix(m, impulse_coefficients_truncated(m, 2 * s.truncation));
    CHECK((L1.entries() - L2.entries()).cwiseAbs().maxCoeff() <= L1.tail_estimate());
  }
}

TEST_CASE("limit matrix in long double agrees with double") {
  const auto Ld = build_limit_matrix(reference_model(), 1e-12);
  const auto Ll = build_limit_matrix(reference_model().cast<long double>(), 1e-15L);
  CHECK((Ld.entries() - Ll.entries().cast<double>()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(static_cast<double>(Ll(2, 2)) == doctest::Approx(244.0 / 99.0).epsilon(1e-14));
}

TEST_CASE("reference limit matrix builds quickly") {
  const auto start = std::chrono::steady_clock::now();
  const auto L = build_limit_matrix(reference_model(), 1e-12);
  const auto us = std::chrono::duration_cast<std::chrono::microseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  MESSAGE("build_limit_matrix: " << us << " us, K = " << L.truncation());
  CHECK(us < 1000);
}
