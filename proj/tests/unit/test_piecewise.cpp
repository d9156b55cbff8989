#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nbx/dilation_basis.hpp"
#include "nbx/piecewise.hpp"
#include "support/oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <random>

using namespace nbx;

TEST_CASE("constant and step") {
  const auto chi = PiecewiseFunction::constant(1.0);
  CHECK(chi(0.9) == 1.0);
  CHECK(chi(0.1) == 1.0);
  CHECK(l1_norm(chi) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(l2_norm_sq(chi) == doctest::Approx(1.0).epsilon(1e-14));

  const auto st = PiecewiseFunction::step(2.0, 0.5);
  CHECK(st(0.75) == 0.0);
  CHECK(st(0.25) == 2.0);
  CHECK(l1_norm(st) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(l2_norm_sq(st) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(lp_norm(st, 4.0) == doctest::Approx(std::pow(8.0, 0.25)).epsilon(1e-12));
  CHECK(st.sup_bound() == 2.0);

  const auto neg = st.scaled(-3.0);
  CHECK(neg(0.25) == -6.0);
  CHECK(l1_norm(neg) == doctest::Approx(3.0));
}

TEST_CASE("from_terms") {
  // 2 - 1/x on (0.5, 1), 3 - 1/x on (0.4, 0.5), constant 0.25 below.
  std::vector<Segment> segs(2);
  segs[0] = {0.5, 1.0, 2.0, -1.0, 0.0};
  segs[1] = {0.4, 0.5, 3.0, -1.0, 0.0};
  const auto f = PiecewiseFunction::from_terms(segs, 0.4, 0.25);
  CHECK(f(0.8) == doctest::Approx(2.0 - 1.25));
  CHECK(f(0.45) == doctest::Approx(3.0 - 1.0 / 0.45));
  CHECK(f(0.1) == 0.25);
  // int_{0.5}^1 (2 - 1/x)^2 + int_{0.4}^{0.5} (3 - 1/x)^2 + 0.4 / 16
  auto sq = [](double a, double lo, double hi) {
    return a * a * (hi - lo) - 2 * a * std::log(hi / lo) + (1 / lo - 1 / hi);
  };
  CHECK(l2_norm_sq(f) == doctest::Approx(sq(2, 0.5, 1) + sq(3, 0.4, 0.5) + 0.025).epsilon(1e-12));
  CHECK_THROWS_AS(PiecewiseFunction::from_terms({{0.5, 0.9, 0, 0, 0}}, 0.5, 0.0), Error);
}

TEST_CASE("segment norms against adaptive quadrature on residuals") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> C(-2.0, 2.0);
  for (int trial = 0; trial < 4; ++trial) {
    const std::size_t n = 2 + 2 * trial;
    std::vector<double> c(n);
    for (auto& v : c) v = C(rng);
    const auto basis = DilationBasis::integers(n);
    const auto f = residual_function(basis, c, 0.02);
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      // Reference over the head (x_cut, 1), split at breakpoints and at sign
      // changes where |f|^p is not smooth.
      double ref = 0.0;
      auto g = [&](double x) { return std::pow(std::abs(f(x)), p); };
      auto gk = [&](double a, double b) {
        return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, a, b, 4, 1e-13);
      };
      for (const auto& s : f.segments()) {
        const double fa = f(s.x_lo * (1 + 1e-15)), fb = f(s.x_hi * (1 - 1e-15));
        if (fa * fb < 0.0) {
          auto side = [&](double x) { return f(x) * fa > 0.0; };
          double lo = s.x_lo, hi = s.x_hi;
          for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
            const double mid = 0.5 * (lo + hi);
            (side(mid) ? lo : hi) = mid;
          }
          ref += gk(s.x_lo, lo) + gk(lo, s.x_hi);
        } else {
          ref += gk(s.x_lo, s.x_hi);
        }
      }
      INFO("n = " << n << ", p = " << p);
      CHECK(head_lp_integral(f, p) == doctest::Approx(ref).epsilon(1e-10));
    }
  }
}

TEST_CASE("tail samples and bounds") {
  const double c[] = {1.0, -0.5};
  const auto f = residual_function(DilationBasis::integers(2), c, 0.01);
  const auto ts = f.tail_samples();
  CHECK(ts.size() == f.tail().samples);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double x = f.x_cut() * (double(i) + 0.5) / double(ts.size());
    REQUIRE(ts[i] == doctest::Approx(1.0 - eval_rho(1, x) + 0.5 * eval_rho(2, x)));
    REQUIRE(std::abs(ts[i]) <= f.tail().bound);
  }
  CHECK(f.sup_bound() >= f.tail().bound);
}
