#pragma once

// K and J functionals for the couple (L^1, L^2) on (0,1) and the
// (theta, q) norms built on K.

#include "nbx/errors.hpp"
#include "nbx/rearrangement.hpp"

#include <limits>
#include <span>

namespace nbx {

class PiecewiseFunction;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct ThetaParams {
  double theta = 0.5;
  double q = kInf;
  bool normalized = false;

  // Exponent with theta = 2 - 2/p.
  double p() const noexcept { return 2.0 / (2.0 - theta); }
  void validate() const;
  // ((1 - theta) theta q)^{1/q}, 1 for q = inf.
  double normalization() const;
  static ThetaParams from_p(double p, double q = kInf, bool normalized = false);
};

enum class NormVariant { Full, Modified };

// t (int_{t^2}^inf f**(s)^2 ds)^{1/2}
double k_l1_l2(const RearrangementProfile& prof, double t);

// inf over f = f0 + f1 of ||f0||_1 + t ||f1||_2 for the step function with the
// given |values| and masses. The optimum clips |f| at one level, which is
// located by golden-section search.
double k_l1_l2_exact(std::span<const double> values, std::span<const double> masses,
                     double t);
double k_l1_l2_exact(const RearrangementProfile& prof, double t);

// max(||f||_1, t ||f||_2)
double j_l1_l2(const PiecewiseFunction& f, double t);

struct ThetaNormResult {
  double value = 0.0;
  double t_star = 0.0;          // argmax for q = inf
  double certificate = 0.0;     // relative change under grid doubling (q = inf)
};

// phi_{theta,q}(K(., f)). Full integrates over t in (0, inf), Modified over
// (0, 1).
ThetaNormResult theta_q_norm_detail(const RearrangementProfile& prof, const ThetaParams& params,
                                    NormVariant variant);
double theta_q_norm(const RearrangementProfile& prof, const ThetaParams& params,
                    NormVariant variant);

}  // namespace nbx
