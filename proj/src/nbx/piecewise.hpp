#pragma once

#include "nbx/errors.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace nbx {

// f(x) = alpha + beta / x on (x_lo, x_hi).
//
// `f_hi` is the limit at x_hi from inside the segment and is what evaluation
// is anchored on; alpha is kept for reporting only, since alpha and beta/x
// can both be large while f stays O(1).
struct Segment {
  double x_lo = 0.0;
  double x_hi = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  double f_hi = 0.0;

  double u_lo() const noexcept { return 1.0 / x_hi; }
  double u_hi() const noexcept { return 1.0 / x_lo; }
  double value(double x) const noexcept {
    return f_hi + beta * (1.0 / x - 1.0 / x_hi);
  }
  // Value as a function of u = 1/x.
  double value_u(double u) const noexcept { return f_hi + beta * (u - 1.0 / x_hi); }
};

// Behaviour of f on (0, x_cut).
struct TailSpec {
  enum class Kind { Constant, Residual };
  Kind kind = Kind::Constant;
  double value = 0.0;   // Constant
  double bound = 0.0;   // sup |f| on (0, x_cut)
  // Residual: f = scale * (1 - sum_k coeffs[k] * rho_{dilations[k]})
  double scale = 1.0;
  std::vector<double> dilations;
  std::vector<double> coeffs;
  // Stratified samples used wherever the tail enters an integral.
  std::size_t samples = 1024;
};

class PiecewiseFunction {
 public:
  PiecewiseFunction() = default;
  // Segments must partition (x_cut, 1) in descending x order.
  PiecewiseFunction(std::vector<Segment> segments, double x_cut, TailSpec tail);

  // chi_(0,1) scaled by `value`.
  static PiecewiseFunction constant(double value, double x_cut = 0.5);
  // value * chi_(0,width).
  static PiecewiseFunction step(double value, double width, double x_cut = 1e-3);
  // From alpha/beta pieces; f_hi is derived.
  static PiecewiseFunction from_terms(std::vector<Segment> segments, double x_cut,
                                      double tail_value);

  std::span<const Segment> segments() const noexcept { return segments_; }
  double x_cut() const noexcept { return x_cut_; }
  const TailSpec& tail() const noexcept { return tail_; }

  double operator()(double x) const;
  // Tail L^1 mass bound: sup|f| * x_cut.
  double tail_l1_bound() const noexcept { return tail_.bound * x_cut_; }
  // Values at the stratified tail points x_i = x_cut (i + 1/2) / n.
  std::vector<double> tail_samples() const;
  // max |f| over the head segments and the tail bound.
  double sup_bound() const;

  PiecewiseFunction scaled(double c) const;

 private:
  std::vector<Segment> segments_;
  double x_cut_ = 0.5;
  TailSpec tail_;
};

// Segment-integrated norms. The tail enters through its stratified samples
// (exact for constant tails).
double l1_norm(const PiecewiseFunction& f);
double l2_norm_sq(const PiecewiseFunction& f);
double lp_norm(const PiecewiseFunction& f, double p);

// Head part only: int_{x_cut}^1 |f|^p dx.
double head_lp_integral(const PiecewiseFunction& f, double p);

}  // namespace nbx
