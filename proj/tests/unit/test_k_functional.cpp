#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nbx/dilation_basis.hpp"
#include "nbx/k_functional.hpp"
#include "nbx/piecewise.hpp"
#include "nbx/rearrangement.hpp"
#include "support/oracles.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <random>

using namespace nbx;

namespace {

RearrangementProfile chi_profile() { return rearrange(PiecewiseFunction::constant(1.0), 64); }

RearrangementProfile random_profile(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> C(-2.0, 2.0);
  std::vector<double> c(n);
  for (auto& v : c) v = C(rng);
  const auto basis = DilationBasis::integers(n);
  return rearrange(residual_function(basis, c, default_cutoff(basis)), 128);
}

std::vector<double> step_masses(const RearrangementProfile& p) {
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = p.step_hi(i) - p.step_lo(i);
  return m;
}

}  // namespace

TEST_CASE("k_l1_l2 closed forms") {
  const auto p = chi_profile();
  CHECK(k_l1_l2(p, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(k_l1_l2(p, 0.5) == doctest::Approx(0.5 * std::sqrt(1.75)).epsilon(1e-13));
  CHECK(k_l1_l2(p, 1e6) == doctest::Approx(p.l1_mass()));
  CHECK_THROWS_AS(k_l1_l2(p, 0.0), Error);
}

TEST_CASE("k_l1_l2 is quasi-concave") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 4; ++trial) {
    const auto p = random_profile(rng, 2 + trial);
    double prev = 0.0, prev_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 200; ++i) {
      const double t = std::pow(10.0, -6.0 + 0.04 * i);
      const double k = k_l1_l2(p, t);
      REQUIRE(k >= prev * (1.0 - 1e-12));
      REQUIRE(k / t <= prev_ratio * (1.0 + 1e-12));
      prev = k;
      prev_ratio = k / t;
    }
  }
}

TEST_CASE("exact K-functional") {
  const std::vector<double> zero(300, 0.0), mass(300, 1.0 / 300);
  CHECK(k_l1_l2_exact(zero, mass, 0.7) == 0.0);

  const auto p = chi_profile();
  CHECK(k_l1_l2_exact(p, 100.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(k_l1_l2_exact(p, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(k_l1_l2_exact(p, 0.25) == doctest::Approx(0.25).epsilon(1e-12));

  // Against a dense scan over the clipping level.
  std::mt19937_64 rng(12);
  const auto q = random_profile(rng, 4);
  const std::vector<double> v(q.fstar().begin(), q.fstar().end());
  const auto m = step_masses(q);
  for (double t : {1e-3, 0.1, 0.5, 1.0, 3.0, 1e3}) {
    INFO("t = " << t);
    CHECK(k_l1_l2_exact(q, t) == doctest::Approx(oracle::k_exact_scan(v, m, t)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(k_l1_l2_exact(v, std::vector<double>(3, 1.0), 1.0), Error);
}

TEST_CASE("j functional") {
  const auto chi = PiecewiseFunction::constant(1.0);
  CHECK(j_l1_l2(chi, 1.0) == doctest::Approx(1.0));
  CHECK(j_l1_l2(chi, 3.0) == doctest::Approx(3.0));
  CHECK(j_l1_l2(PiecewiseFunction::step(2.0, 0.5), 1.0) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("theta params") {
  CHECK(ThetaParams{0.5, kInf, true}.normalization() == 1.0);
  CHECK(ThetaParams{0.5, 2.0, true}.normalization() == doctest::Approx(std::sqrt(0.5)));
  CHECK(ThetaParams::from_p(4.0 / 3.0).theta == doctest::Approx(0.5));
  CHECK(ThetaParams::from_p(1.5).p() == doctest::Approx(1.5));
  CHECK_THROWS_AS(ThetaParams::from_p(2.5), Error);
  CHECK_THROWS_AS((ThetaParams{1.0, 2.0}.validate()), Error);
  CHECK_THROWS_AS((ThetaParams{0.5, 0.5}.validate()), Error);
}

TEST_CASE("theta norms of chi") {
  const auto p = chi_profile();
  // sup_{t<1} t^{1/2} (2 - t^2)^{1/2} is attained at t^2 = 2/3.
  const auto r = theta_q_norm_detail(p, {0.5, kInf, false}, NormVariant::Modified);
  CHECK(r.value == doctest::Approx(std::pow(2.0 / 3.0, 0.25) * std::sqrt(4.0 / 3.0)).epsilon(1e-10));
  CHECK(r.t_star == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-5));

  for (double th : {0.3, 0.5, 0.9}) {
    const double a = theta_q_norm(p, {th, kInf, false}, NormVariant::Full);
    const double b = theta_q_norm(p, {th, kInf, true}, NormVariant::Full);
    CHECK(a == b);
    const double mod = theta_q_norm(p, {th, kInf, false}, NormVariant::Modified);
    CHECK(a / mod >= 1.0 - 1e-12);
    CHECK(a / mod <= 2.0 + 1e-12);
  }

  // Finite q against direct quadrature of the closed form.
  for (double th : {0.25, 0.5, 0.8}) {
    for (double q : {1.0, 2.0, 4.0}) {
      // t = e^{-y} turns dt/t into dy and removes the endpoint singularity.
      auto g = [&](double y) {
        const double t = std::exp(-y);
        return std::pow(std::pow(t, 1.0 - th) * std::sqrt(2.0 - t * t), q);
      };
      const double head = boost::math::quadrature::exp_sinh<double>().integrate(g, 1e-15);
      const double full = std::pow(head + 1.0 / (th * q), 1.0 / q);
      const double mod = std::pow(head, 1.0 / q);
      INFO("theta = " << th << ", q = " << q);
      CHECK(theta_q_norm(p, {th, q, false}, NormVariant::Full) ==
            doctest::Approx(full).epsilon(1e-9));
      CHECK(theta_q_norm(p, {th, q, false}, NormVariant::Modified) ==
            doctest::Approx(mod).epsilon(1e-9));
      const double nrm = std::pow((1 - th) * th * q, 1.0 / q);
      CHECK(theta_q_norm(p, {th, q, true}, NormVariant::Full) ==
            doctest::Approx(full * nrm).epsilon(1e-9));
    }
  }
}

TEST_CASE("norm ordering and L^p recovery on random residuals") {
  std::mt19937_64 rng(21);
  double lo = kInf, hi = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = 1 + trial;
    std::uniform_real_distribution<double> C(-2.0, 2.0);
    std::vector<double> c(n);
    for (auto& v : c) v = C(rng);
    const auto basis = DilationBasis::integers(n);
    const auto f = residual_function(basis, c, default_cutoff(basis));
    const auto p = rearrange(f, 128);
    for (double th : {0.2, 0.5, 0.8}) {
      const double q = 2.0 / (2.0 - th);
      const double sup_norm = theta_q_norm(p, {th, kInf, true}, NormVariant::Full);
      const double q_norm = theta_q_norm(p, {th, q, true}, NormVariant::Full);
      REQUIRE(sup_norm <= q_norm * (1.0 + 1e-9));
      const double ratio = q_norm / lp_norm(f, q);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  MESSAGE("theta,p norm / L^p norm band: [" << lo << ", " << hi << "]");
  CHECK(lo > 0.0);
  CHECK(std::isfinite(hi));
}
