#pragma once

// Decreasing rearrangement of |f| on (0,1) and the quantities derived from
// it: f**, K(s, f; L^1, L^inf) = s f**(s) and the suffix integrals of f**^2.
//
// The profile is a step function in s. Each monotone piece of |f| is cut into
// cells; every cell is replaced by two half-mass steps at mean +- deviation,
// which keeps both int |f| and int f^2 of the cell exact. The steps are then
// sorted. For s >= 1, f* = 0 and f**(s) = l1_mass / s.

#include "nbx/errors.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace nbx {

class PiecewiseFunction;

// Where a step of the profile came from: u = 1/x inside the original cell and
// the sign of f there. Used for derivatives with respect to coefficients.
struct StepSource {
  double u = 1.0;
  double sign = 1.0;
};

struct RearrangeCertificate {
  std::size_t grid_size = 0;
  std::size_t refinements = 0;  // doublings performed (1 or 2)
  double l1_change = 0.0;       // |l1(G) - l1(2G)| at the accepted level
};

class RearrangementProfile {
 public:
  RearrangementProfile() = default;

  // Steps with the given values and masses, sorted internally. Masses are
  // normalised to total 1.
  static RearrangementProfile from_steps(std::vector<double> values,
                                         std::vector<double> masses,
                                         std::vector<StepSource> sources = {});

  std::size_t size() const noexcept { return values_.size(); }
  // Right end points s_i of the steps, strictly increasing, last one 1.
  std::span<const double> grid() const noexcept {
    return std::span<const double>(bounds_).subspan(1);
  }
  std::span<const double> fstar() const noexcept { return values_; }
  // cum[i] = int_0^{grid[i]} f*.
  std::span<const double> cum() const noexcept {
    return std::span<const double>(cum_).subspan(1);
  }
  std::span<const StepSource> sources() const noexcept { return sources_; }
  double l1_mass() const noexcept { return l1_; }
  double l2_sq() const noexcept { return l2sq_; }
  // f*(0+)
  double sup() const noexcept { return values_.empty() ? 0.0 : values_.front(); }
  const RearrangeCertificate& certificate() const noexcept { return cert_; }
  void set_certificate(const RearrangeCertificate& c) { cert_ = c; }

  // f*(s), right-continuous convention f*(s_i) = value of the step ending at s_i.
  double fstar_at(double s) const;
  // int_0^s f*
  double k_l1_linf(double s) const;
  double double_star(double s) const;
  // int_tau^inf f**(s)^2 ds, tau >= 0.
  double tail_sq_integral(double tau) const;
  // int_tau^inf f**(s) / s ds for tau > 0.
  double tail_star_over_s(double tau) const;
  // Index of the step containing s (s in (s_i, s_{i+1}]); size() for s >= 1.
  std::size_t step_index(double s) const;
  // Left end point of step i.
  double step_lo(std::size_t i) const { return bounds_[i]; }
  double step_hi(std::size_t i) const { return bounds_[i + 1]; }

  RearrangementProfile scaled(double c) const;

  // "s,fstar,fstarstar" rows at the step end points.
  void write_csv(std::ostream& out) const;

 private:
  void finalize();

  std::vector<double> bounds_;  // s_0 = 0 < s_1 < ... < s_n = 1
  std::vector<double> values_;
  std::vector<double> cum_;     // at bounds
  std::vector<StepSource> sources_;
  // Suffix sums over steps i.. of int f**^2 and int f**/s.
  std::vector<double> suffix_sq_;
  std::vector<double> suffix_inv_;
  double l1_ = 0.0;
  double l2sq_ = 0.0;
  RearrangeCertificate cert_;
};

struct RearrangeOptions {
  double certificate_tol = 1e-8;
  bool certify = true;
  bool keep_sources = false;
};

// Throws NonConvergence if two doublings of grid_size still move l1_mass by
// >= certificate_tol.
RearrangementProfile rearrange(const PiecewiseFunction& f, std::size_t grid_size,
                               const RearrangeOptions& opts = {});

}  // namespace nbx
