#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nbx/dilation_basis.hpp"
#include "nbx/extrapolation.hpp"
#include "nbx/k_functional.hpp"
#include "nbx/piecewise.hpp"
#include "nbx/rearrangement.hpp"

#include <cmath>
#include <random>

using namespace nbx;

namespace {

RearrangementProfile chi_profile() { return rearrange(PiecewiseFunction::constant(1.0), 64); }

PiecewiseFunction random_residual(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> C(-2.0, 2.0);
  std::vector<double> c(n);
  for (auto& v : c) v = C(rng);
  const auto basis = DilationBasis::integers(n);
  return residual_function(basis, c, default_cutoff(basis));
}

}  // namespace

TEST_CASE("weight presets") {
  CHECK(TemperedWeight::one()(0.9) == 1.0);
  const auto p1 = TemperedWeight::power(1.0);
  CHECK(p1(0.9) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(p1(0.95) / p1(0.9) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p1.certificate().c_t == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(p1.id() == "power:1");
  const auto ld = TemperedWeight::log_damp();
  CHECK(ld(1.0 - 1e-6) == doctest::Approx(1.0 / (1.0 + 6.0 * std::log(10.0))));
  MESSAGE("logdamp c_T = " << ld.certificate().c_t);
  CHECK(ld.certificate().c_t > 1.0);
  CHECK(ld.certificate().c_t < 2.0);

  CHECK(TemperedWeight::parse("power:2.5").alpha() == 2.5);
  CHECK(TemperedWeight::parse("logdamp").kind() == TemperedWeight::Kind::LogDamp);
  CHECK_THROWS_AS(TemperedWeight::parse("power:"), Error);
  CHECK_THROWS_AS(TemperedWeight::parse("power:-1"), Error);
  CHECK_THROWS_AS(TemperedWeight::parse("cosh"), Error);
  CHECK_THROWS_AS(TemperedWeight::one()(1.0), Error);
}

TEST_CASE("omega") {
  CHECK(omega_from_weight(TemperedWeight::one(), 1.5) == 1.0);
  CHECK(omega_from_weight(TemperedWeight::power(1.0), 4.0 / 3.0) == doctest::Approx(0.5));
  CHECK(omega_from_weight(TemperedWeight::power(2.0), 2.0 - 1e-9) < 1e-16);
  CHECK_THROWS_AS(omega_from_weight(TemperedWeight::one(), 2.0), Error);
  CHECK_THROWS_AS(omega_from_weight(TemperedWeight::one(), 1.0), Error);
}

TEST_CASE("grids") {
  const auto g = DeltaGrid::standard();
  CHECK(g.theta.size() == 20);
  CHECK(g.t.size() == 41);
  CHECK(g.theta.front() == 0.5);
  CHECK(g.t.back() == doctest::Approx(std::exp2(-20.0)));
  const auto d = DeltaGrid::doubled();
  CHECK(d.theta.size() == 39);
  CHECK(d.t.size() == 81);
  CHECK(d.theta.back() == g.theta.back());
  CHECK(g.restricted(0.8).theta.front() == 0.875);
}

TEST_CASE("delta norm closed forms") {
  const auto p = chi_profile();
  const auto r = delta_norm(p, TemperedWeight::one());
  CHECK(std::abs(r.value / std::sqrt(2.0) - 1.0) <= kDeltaStabilityTol);
  CHECK(r.theta_star > 0.99);
  CHECK(r.t_star < 0.01);

  const auto z = rearrange(PiecewiseFunction::constant(0.0), 64);
  CHECK(delta_norm(z, TemperedWeight::one()).value == 0.0);
  CHECK(delta_norm_theta_restricted(z, TemperedWeight::one(), 0.3).value == 0.0);

  // M = 1 - theta: every row peaks at t^2 = 2(1-theta)/(2-theta) and the
  // weight favours the smallest theta on the grid.
  const auto w = delta_norm(p, TemperedWeight::power(1.0));
  auto row = [](double th) {
    const double t2 = 2.0 * (1.0 - th) / (2.0 - th);
    return (1.0 - th) * std::pow(t2, 0.5 * (1.0 - th)) * std::sqrt(2.0 - t2);
  };
  CHECK(w.value < std::sqrt(2.0));
  CHECK(w.value == doctest::Approx(row(0.5)).epsilon(1e-9));
  CHECK(w.theta_star == 0.5);

  const auto rr = delta_norm_theta_restricted(p, TemperedWeight::one(), 0.5);
  CHECK(std::abs(rr.value / std::sqrt(2.0) - 1.0) <= kDeltaStabilityTol);
}

TEST_CASE("weight monotonicity and homogeneity") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 4; ++trial) {
    const auto p = rearrange(random_residual(rng, 1 + 2 * trial), 128);
    const double v2 = delta_norm(p, TemperedWeight::power(2.0)).value;
    const double v1 = delta_norm(p, TemperedWeight::power(1.0)).value;
    const double vl = delta_norm(p, TemperedWeight::log_damp()).value;
    const double vo = delta_norm(p, TemperedWeight::one()).value;
    CHECK(v2 <= v1);
    CHECK(v1 <= vl);
    CHECK(vl <= vo);
    for (double c : {-3.0, 0.25, 7.0}) {
      const double vc = delta_norm(p.scaled(c), TemperedWeight::log_damp()).value;
      CHECK(std::abs(vc - std::abs(c) * vl) <= 1e-10 * std::abs(c) * vl);
    }
  }
}

TEST_CASE("theta restriction ratios are bounded on the corpus") {
  std::mt19937_64 rng(9);
  double worst = 1.0;
  for (int trial = 0; trial < 4; ++trial) {
    const auto p = rearrange(random_residual(rng, 1 + trial), 128);
    const double full = delta_norm(p, TemperedWeight::one()).value;
    for (double th0 : {0.25, 0.5, 0.75}) {
      const double res = delta_norm_theta_restricted(p, TemperedWeight::one(), th0).value;
      REQUIRE(res <= full * (1.0 + 1e-12));
      worst = std::max(worst, full / res);
    }
  }
  MESSAGE("full / restricted delta norm, worst over corpus: " << worst);
  CHECK(worst < 10.0);
}

TEST_CASE("domination by L^p norms for o(1) weights") {
  std::mt19937_64 rng(13);
  for (const auto& w : {TemperedWeight::power(1.0), TemperedWeight::log_damp()}) {
    for (int trial = 0; trial < 4; ++trial) {
      const auto f = random_residual(rng, 1 + trial);
      const auto p = rearrange(f, 128);
      for (double pp : {1.05, 1.2, 1.4, 1.6, 1.8, 1.95}) {
        const auto params = ThetaParams::from_p(pp, kInf, true);
        const double lhs = omega_from_weight(w, pp) * theta_q_norm(p, params, NormVariant::Modified);
        INFO(w.id() << ", p = " << pp);
        REQUIRE(lhs <= lp_norm(f, pp) + 1e-9);
      }
    }
  }
}
