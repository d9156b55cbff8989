#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nbx/dilation_basis.hpp"
#include "nbx/piecewise.hpp"
#include "support/oracles.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace nbx;

TEST_CASE("eval_rho examples and range") {
  CHECK(eval_rho(1.0, 0.4) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(eval_rho(2.0, 1.0) == 0.5);
  CHECK(eval_rho(1.0, 1.0) == 0.0);
  CHECK_THROWS_AS(eval_rho(0.5, 0.3), Error);
  CHECK_THROWS_AS(eval_rho(1.0, 0.0), Error);
  CHECK_THROWS_AS(eval_rho(1.0, -0.1), Error);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> A(1.0, 50.0), X(1e-9, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double v = eval_rho(A(rng), X(rng));
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
  }
}

TEST_CASE("breakpoints") {
  auto b = breakpoints(1.0, 0.3);
  REQUIRE(b.size() == 3);
  CHECK(b[0] == 1.0);
  CHECK(b[1] == 0.5);
  CHECK(b[2] == doctest::Approx(1.0 / 3.0));

  // 1/(2m) >= 0.2 only for m = 1, 2.
  b = breakpoints(2.0, 0.2);
  REQUIRE(b.size() == 2);
  CHECK(b[0] == 0.5);
  CHECK(b[1] == 0.25);

  b = breakpoints(1.0, 0.9);
  REQUIRE(b.size() == 1);
  CHECK(b[0] == 1.0);
}

TEST_CASE("basis construction") {
  const auto b = DilationBasis::integers(4);
  CHECK(b.size() == 4);
  CHECK(b.all_integer());
  CHECK(b[3] == 4.0);
  CHECK(DilationBasis::from({1.0, 1.5}).all_integer() == false);
  CHECK_THROWS_AS(DilationBasis::from({0.5}), Error);
  CHECK_THROWS_AS(DilationBasis::from({2.0, 1.0}), Error);
  CHECK(b.prefix(2).size() == 2);
}

TEST_CASE("phi constraint residual") {
  const double c1[] = {5.0, -2.0, 7.0};
  CHECK(phi_constraint_residual(DilationBasis::integers(3), c1) == 0.0);
  const double c2[] = {3.0};
  CHECK(phi_constraint_residual(DilationBasis::from({1.5}), c2) == doctest::Approx(2.0));
  const double c3[] = {1.0, -2.0};
  CHECK(std::abs(phi_constraint_residual(DilationBasis::from({2.5, 5.0}), c3)) < 1e-15);
  CHECK_THROWS_AS(phi_constraint_residual(DilationBasis::integers(2), std::span<const double>(c3, 1)), Error);

  CHECK(make_coefficients(DilationBasis::integers(3), {5.0, -2.0, 7.0}).phi_member());
  CHECK_FALSE(make_coefficients(DilationBasis::from({1.5}), {3.0}).phi_member());
}

TEST_CASE("known pairings") {
  CHECK(inner_product(Atom::chi(), Atom::chi(), 1e-12) == doctest::Approx(1.0).epsilon(1e-14));

  const double one_minus_gamma = oracle::one_minus_gamma();
  CHECK(std::abs(inner_product(Atom::chi(), Atom::rho(1.0), 1e-12) - one_minus_gamma) < 1e-11);

  const double v11 = oracle::v11_series();
  CHECK(std::abs(inner_product(1.0, 1.0, 1e-12) - v11) < 1e-11);

  // Independent Monte Carlo check of the same value.
  const double mc = oracle::stratified_mc(
      [](double x) {
        const double r = oracle::frac(1.0 / x);
        return r * r;
      },
      4'000'000, 11);
  CHECK(std::abs(mc - v11) < 1e-4);
}

TEST_CASE("symmetry and adaptive-quadrature oracle on random pairs") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<long> D(1, 12);
  const double tol = 1e-12;
  for (int i = 0; i < 20; ++i) {
    const long a = D(rng), b = D(rng);
    const double ab = inner_product(double(a), double(b), tol);
    const double ba = inner_product(double(b), double(a), tol);
    CHECK(std::abs(ab - ba) <= 2 * tol);
    const double ref = oracle::pairing(a, b);
    INFO("a = " << a << ", b = " << b);
    CHECK(std::abs(ab - ref) <= 1e-10);
  }
}

TEST_CASE("non-integer dilations") {
  const double tol = 1e-10;
  // Rational ratio: common period detected.
  PairingStats st;
  const double v = inner_product(Atom::rho(1.5), Atom::rho(2.5), tol, {}, &st);
  CHECK(st.period > 0.0);
  CHECK(v > 0.0);
  CHECK(v < 1.0 / 3.0 + 1e-9);
  CHECK(std::abs(v - inner_product(Atom::rho(2.5), Atom::rho(1.5), tol)) < 2 * tol);

  // x = 2y turns the pair into integers: 2 (<rho_3, rho_5> - int_{1/2}^1 dy / (15 y^2)).
  CHECK(std::abs(v - 2.0 * (oracle::pairing(3, 5) - 1.0 / 15.0)) < 1e-9);

  const double w = inner_product(Atom::rho(1.0), Atom::rho(std::sqrt(2.0)), 1e-6);
  CHECK(w > 0.0);
  CHECK(w < 0.5);
  PairingOptions small;
  small.segment_budget = 1000;
  // No common period: a tight tolerance needs more segments than allowed.
  CHECK_THROWS_AS(inner_product(Atom::rho(1.0), Atom::rho(std::sqrt(2.0)), 1e-12, small), Error);
}

TEST_CASE("log generator pairings") {
  CHECK(inner_product(Atom::log_chi(), Atom::log_chi(), 1e-12) == doctest::Approx(2.0));
  CHECK(inner_product(Atom::log_chi(), Atom::chi(), 1e-12) == doctest::Approx(-1.0));
  const double v = inner_product(Atom::log_chi(), Atom::rho(1.0), 1e-10);
  const double mc = oracle::stratified_mc(
      [](double x) { return oracle::frac(1.0 / x) * std::log(x); }, 4'000'000, 5);
  CHECK(std::abs(v - mc) < 2e-4);
}

TEST_CASE("gram matrix is positive semidefinite") {
  for (std::size_t n : {8, 32, 64}) {
    const double tol = 1e-12;
    Eigen::MatrixXd G(n, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = j; k < n; ++k)
        G(j, k) = G(k, j) = inner_product(double(j + 1), double(k + 1), tol);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -double(n) * tol);
  }
}

TEST_CASE("residual function") {
  SUBCASE("empty basis") {
    const auto f = residual_function(DilationBasis(), {}, 0.3);
    REQUIRE(f.segments().size() == 1);
    CHECK(f(0.5) == 1.0);
    CHECK(f.segments()[0].beta == 0.0);
  }
  SUBCASE("single dilation") {
    const double c[] = {1.0};
    const auto f = residual_function(DilationBasis::integers(1), c, 0.45);
    REQUIRE(f.segments().size() == 2);
    CHECK(f(0.7) == doctest::Approx(2.0 - 1.0 / 0.7));
    CHECK(f(0.47) == doctest::Approx(3.0 - 1.0 / 0.47));
    CHECK(f.segments()[0].beta == doctest::Approx(-1.0));
    CHECK(f.segments()[0].alpha == doctest::Approx(2.0));
    CHECK(f.segments()[1].alpha == doctest::Approx(3.0));
  }
  SUBCASE("pointwise against eval_rho") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 5; ++trial) {
      const std::size_t n = 1 + trial;
      std::uniform_real_distribution<double> C(-2.0, 2.0);
      std::vector<double> c(n);
      for (auto& v : c) v = C(rng);
      const auto basis = DilationBasis::integers(n);
      const double x_cut = 0.3 / double(n);
      const auto f = residual_function(basis, c, x_cut);
      double sum_abs = 1.0;
      for (double v : c) sum_abs += std::abs(v);
      CHECK(f.tail_l1_bound() <= sum_abs * x_cut + 1e-15);
      std::uniform_real_distribution<double> X(x_cut, 1.0);
      for (int i = 0; i < 1000; ++i) {
        const double x = X(rng);
        double ref = 1.0;
        for (std::size_t k = 0; k < n; ++k) ref -= c[k] * eval_rho(basis[k], x);
        REQUIRE(std::abs(f(x) - ref) < 1e-12);
      }
      // Segment slopes: beta = -sum c_k / a_k on every piece.
      double beta = 0.0;
      for (std::size_t k = 0; k < n; ++k) beta -= c[k] / basis[k];
      for (const auto& s : f.segments()) REQUIRE(s.beta == doctest::Approx(beta));
    }
  }
}

TEST_CASE("tail pairing matches head difference") {
  const double tol = 1e-12;
  for (auto [a, b] : {std::pair{1.0, 1.0}, {2.0, 3.0}, {1.0, 4.0}}) {
    const double full = inner_product(a, b, tol);
    const double tail = tail_pairing(Atom::rho(a), Atom::rho(b), 1.0, tol);
    CHECK(std::abs(full - tail) < 4 * tol);
  }
}

TEST_CASE("default cutoff") {
  const auto b = DilationBasis::integers(16);
  const double x = default_cutoff(b);
  CHECK(x > 0.0);
  CHECK(x < 1.0 / 64.0 + 1e-15);
}
