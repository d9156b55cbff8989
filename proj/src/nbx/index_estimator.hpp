#pragma once

// Lower and upper dilation indices of a sampled quasi-concave function.
//
// With l = log phi and x = log s, phi(s)/phi(t) <= gamma (s/t)^theta for all
// s < t is (l_s - theta x_s) - (l_t - theta x_t) <= log gamma, so the least
// admissible gamma for a given theta is a running max over the grid.

#include "nbx/errors.hpp"

#include <iosfwd>
#include <vector>

namespace nbx {

class QuasiConcaveSample {
 public:
  // Throws NotQuasiConcave unless the grid is increasing in (0, 1], values
  // are positive, phi is nondecreasing and phi(s)/s nonincreasing (relative
  // tolerance `tol`).
  QuasiConcaveSample(std::vector<double> grid, std::vector<double> values, double tol = 1e-9);

  // Rows of a rearrangement profile dump; phi(s) = s f**(s).
  static QuasiConcaveSample from_profile_csv(std::istream& in, double tol = 1e-9);

  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return grid_.size(); }

 private:
  std::vector<double> grid_, values_;
};

struct IndexEstimate {
  double alpha0 = 0.0;
  double beta0 = 1.0;
  // Extreme chord slopes of log phi against log s over pairs at least half
  // the log range apart.
  double alpha_chord = 0.0;
  double beta_chord = 1.0;
  double gamma_cap = 1e3;
};

// log of the least gamma with phi(s)/phi(t) <= gamma (s/t)^theta over all grid
// pairs s < t.
double log_gamma_upper(const QuasiConcaveSample& q, double theta);
// log of the least gamma with phi(s)/phi(t) >= (s/t)^theta / gamma.
double log_gamma_lower(const QuasiConcaveSample& q, double theta);

// Least C with s^{-theta} phi(s) <= C t^{-theta} phi(t) for s < t.
double almost_increasing_constant(const QuasiConcaveSample& q, double theta);

// Needs at least 64 grid points and gamma_cap >= 1.
IndexEstimate estimate_indices(const QuasiConcaveSample& q, double gamma_cap = 1e3);

// Reference scan over every pair of a thinned grid (at most `points` points).
IndexEstimate estimate_indices_bruteforce(const QuasiConcaveSample& q, double gamma_cap = 1e3,
                                          std::size_t points = 141);

}  // namespace nbx
