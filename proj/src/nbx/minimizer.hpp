#pragma once

// Best approximation of the generator by finite combinations of dilated
// fractional parts: in L^2 through the Gram system, and in the weighted
// extrapolation norm by a projected subgradient method.

#include "nbx/dilation_basis.hpp"
#include "nbx/errors.hpp"
#include "nbx/extrapolation.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nbx {

enum class Generator { Chi, LogChi };

struct GramData {
  DilationBasis basis;
  Generator generator = Generator::Chi;
  double tol = 1e-12;
  Eigen::MatrixXd gram;   // <rho_j, rho_k>
  Eigen::VectorXd rhs;    // <g, rho_k>
  double generator_sq = 1.0;

  std::size_t size() const noexcept { return basis.size(); }
  GramData prefix(std::size_t n) const;
};

GramData assemble_gram(const DilationBasis& basis, double tol = 1e-12,
                       Generator gen = Generator::Chi);

// Integer bases only. Looks for "gram_int_<n>_<tol>.csv" in `dir` (or any
// larger cached n, of which the leading block is used); assembles and writes
// on a miss. An empty dir disables caching.
GramData cached_integer_gram(std::size_t n, double tol, const std::string& dir);

// "j,k,value" rows for the full symmetric matrix, 1-based indices.
void write_gram_csv(const GramData& g, std::ostream& out);
// "k,value" rows.
void write_rhs_csv(const GramData& g, std::ostream& out);

struct DistanceReport {
  std::size_t n = 0;
  double l2_distance = 1.0;
  double d2_quadratic = 1.0;    // g0 - 2 b.c + c.G.c
  double d2_projection = 1.0;   // g0 - b.c
  std::optional<double> d2_direct;
  CoefficientVector l2_coeffs;
  bool constrained = false;
  double normal_residual = 0.0;  // ||G c - b + mu r||_inf
  double cond_estimate = 1.0;
  bool regularized = false;
  double reg_lambda = 0.0;
  double reg_bias = 0.0;         // lambda ||c||_2

  std::optional<double> delta_distance;
  CoefficientVector delta_coeffs;
  double delta_at_l2 = 0.0;
  double delta_at_zero = 0.0;
  double delta_theta_star = 0.0;
  double delta_t_star = 0.0;
  std::size_t iterations = 0;
  bool budget_exhausted = false;
  std::string weight = "one";
  std::string error;  // set when the sweep recorded a failure for this n
};

// Throws IllConditioned if even the regularised solve leaves ||Gc - b|| > 1e-6.
DistanceReport l2_distance(const GramData& g, bool constrained = false);

// ||g - sum c_k rho_k||_2^2 from the merged residual pieces below u = 1/x_cut
// and certified pairwise tails above it.
double direct_distance_sq(const DilationBasis& basis, std::span<const double> coeffs,
                          double x_cut = 0.0);

struct DeltaOptions {
  std::size_t budget = 80;          // subgradient iterations
  std::size_t grid_size = 64;       // rearrangement resolution
  std::size_t segment_budget = 20'000;
  DeltaGrid grid = DeltaGrid::standard();
};

// Objective value at c: the standard-grid delta norm of chi - sum c_k rho_k.
DeltaNormResult delta_objective(const DilationBasis& basis, std::span<const double> coeffs,
                                const TemperedWeight& w, const DeltaOptions& opts = {});

// Starts from `start` (the L^2 minimiser in the sweep). The returned value is
// min(best iterate, objective at start, objective at 0).
DistanceReport delta_distance(const GramData& g, const TemperedWeight& w,
                              const DeltaOptions& opts = {},
                              const std::vector<double>* start = nullptr);

struct SweepOptions {
  bool constrained = false;
  bool with_delta = true;
  bool cross_check = true;
  DeltaOptions delta;
  std::string cache_dir;
  double tol = 1e-12;
};

// n = 1, 2, 4, ... up to n_max (n_max itself is appended if not a power of
// two). Failures are recorded per n and the sweep continues.
std::vector<DistanceReport> sweep(std::size_t n_max, const TemperedWeight& w,
                                  const SweepOptions& opts = {});

// "n,l2_distance,delta_distance,weight,cond_estimate"
void write_sweep_csv(const std::vector<DistanceReport>& reports, std::ostream& out);

}  // namespace nbx
