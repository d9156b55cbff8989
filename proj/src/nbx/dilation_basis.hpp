#pragma once

// Dilated fractional-part functions rho_a(x) = {1/(a x)} on (0, 1] and their
// L^2(0,1) pairings.
//
// All integrals are evaluated in the variable u = 1/x, where rho_a becomes the
// sawtooth u/a - floor(u/a) and dx = du/u^2. Pairings are summed segment by
// segment between consecutive breakpoints; the tail u > U is summed period by
// period with Euler-Maclaurin and an explicit remainder bound.

#include "nbx/errors.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace nbx {

class PiecewiseFunction;

inline constexpr double kConstraintTol = 1e-12;

class DilationBasis {
 public:
  DilationBasis() = default;

  // a_k = k for k = 1..n.
  static DilationBasis integers(std::size_t n);
  // Throws Domain if any a < 1 or the list is not strictly increasing.
  static DilationBasis from(std::vector<double> dilations);

  std::span<const double> dilations() const noexcept { return dilations_; }
  std::size_t size() const noexcept { return dilations_.size(); }
  bool empty() const noexcept { return dilations_.empty(); }
  double operator[](std::size_t k) const { return dilations_[k]; }
  bool all_integer() const noexcept { return all_integer_; }
  DilationBasis prefix(std::size_t n) const;

 private:
  explicit DilationBasis(std::vector<double> d);
  std::vector<double> dilations_;
  bool all_integer_ = true;
};

struct CoefficientVector {
  std::vector<double> coeffs;
  double constraint_residual = 0.0;

  bool phi_member(double tol = kConstraintTol) const;
};

// {1/(a x)}; Domain error unless a >= 1 and 0 < x <= 1.
double eval_rho(double a, double x);

// Points 1/(a m) in (x_cut, 1], m = 1, 2, ..., in descending order.
std::vector<double> breakpoints(double a, double x_cut);

// One factor of an L^2(0,1) pairing.
struct Atom {
  enum class Kind { Chi, LogChi, Rho };
  Kind kind = Kind::Chi;
  double dilation = 1.0;

  static Atom chi() { return {Kind::Chi, 1.0}; }
  // chi_(0,1)(x) * log x
  static Atom log_chi() { return {Kind::LogChi, 1.0}; }
  static Atom rho(double a) { return {Kind::Rho, a}; }
};

struct PairingStats {
  double tail_start = 0.0;      // u where the Euler-Maclaurin tail begins
  double tail_bound = 0.0;      // certified bound on the tail remainder
  double period = 0.0;          // 0 when no common period was found
  std::size_t segments = 0;     // head segments summed
  int em_order = 0;
};

struct PairingOptions {
  std::size_t segment_budget = 50'000'000;
  // Largest denominator accepted when detecting a rational ratio b/a.
  long long max_ratio_denominator = 1'000'000;
};

// int_0^1 A(x) B(x) dx with absolute error <= tol.
// Throws ToleranceNotReached if the tail cannot be certified within budget.
double inner_product(Atom lhs, Atom rhs, double tol,
                     const PairingOptions& opts = {},
                     PairingStats* stats = nullptr);

// Same integrand restricted to (0, 1/u_start), i.e. u in (u_start, inf).
// Only Chi/Rho atoms are accepted (the pairings of the residual tail).
double tail_pairing(Atom lhs, Atom rhs, double u_start, double tol,
                    const PairingOptions& opts = {},
                    PairingStats* stats = nullptr);

inline double inner_product(double a, double b, double tol) {
  return inner_product(Atom::rho(a), Atom::rho(b), tol);
}

// Coefficient of c_k in the linear membership constraint.
double constraint_weight(const DilationBasis& basis, std::size_t k);

// sum_k c_k rho(1/a_k); identically zero on integer bases.
double phi_constraint_residual(const DilationBasis& basis,
                               std::span<const double> coeffs);

CoefficientVector make_coefficients(const DilationBasis& basis,
                                    std::vector<double> coeffs);

// chi_(0,1) - sum_k c_k rho_{a_k} as exact alpha + beta/x pieces on (x_cut, 1)
// with the oscillating part below x_cut kept as a bounded tail.
PiecewiseFunction residual_function(const DilationBasis& basis,
                                    std::span<const double> coeffs,
                                    double x_cut);

// Cutoff giving roughly `segment_budget` head segments for the basis.
double default_cutoff(const DilationBasis& basis,
                      std::size_t segment_budget = 20'000);

}  // namespace nbx
