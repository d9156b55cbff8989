#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <span>

namespace nbx {

// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Fixed-order Gauss-Legendre rule on [a, b].
template <unsigned Points = 8, class F>
double gauss_legendre(F&& f, double a, double b) {
  return boost::math::quadrature::gauss<double, Points>::integrate(f, a, b);
}

// Gauss-Legendre on [u0, u1] where the integrand carries a factor with a pole
// at u = 0 (u0 > 0). Panels are kept to width <= ratio * left end so the rule
// stays at rounding-level accuracy.
template <unsigned Points = 8, class F>
double gauss_legendre_graded(F&& f, double u0, double u1, double ratio = 0.125) {
  CompensatedSum acc;
  double lo = u0;
  while (lo < u1) {
    double hi = lo * (1.0 + ratio);
    if (hi >= u1 || !(hi > lo)) hi = u1;
    acc += gauss_legendre<Points>(f, lo, hi);
    lo = hi;
  }
  return acc.value();
}

inline double fractional_part(double y) noexcept { return y - std::floor(y); }

}  // namespace nbx
