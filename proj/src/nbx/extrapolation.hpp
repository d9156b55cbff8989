#pragma once

// Weighted sup over (theta, t) of M(theta) t^{1 - theta} (int_{t^2}^inf f**^2)^{1/2}
// for the couple (L^1, L^2) on (0,1), with t restricted to (0, 1].

#include "nbx/errors.hpp"
#include "nbx/rearrangement.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace nbx {

class TemperedWeight {
 public:
  enum class Kind { One, Power, LogDamp };

  struct Certificate {
    double c_t = 1.0;          // max of M((1+theta)/2)/M(theta) and its inverse
    double theta_lo = 0.9;
    double theta_hi = 1.0 - 1e-6;
    std::size_t samples = 0;
  };

  static constexpr double kTemperCap = 1e3;

  static TemperedWeight one();
  // (1 - theta)^alpha, alpha > 0.
  static TemperedWeight power(double alpha);
  // 1 / (1 + |log(1 - theta)|)
  static TemperedWeight log_damp();
  // "one" | "power:<alpha>" | "logdamp"; Config error otherwise.
  static TemperedWeight parse(std::string_view spec);

  Kind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  double operator()(double theta) const;
  // M(theta) = O(1) as theta -> 1.
  bool o1_at_1() const noexcept { return true; }
  const Certificate& certificate() const noexcept { return cert_; }
  std::string id() const;

 private:
  TemperedWeight(Kind k, double alpha);
  void certify();

  Kind kind_ = Kind::One;
  double alpha_ = 0.0;
  Certificate cert_;
};

// M(2 - 2/p) for p in (1, 2).
double omega_from_weight(const TemperedWeight& w, double p);

struct DeltaGrid {
  std::vector<double> theta;  // ascending in (0,1)
  std::vector<double> t;      // in (0,1]

  // theta = 1 - 2^{-j}, j = 1..theta_levels; t = 2^{-i/2}, i = 0..t_levels.
  static DeltaGrid standard(int theta_levels = 20, int t_levels = 40);
  // Twice as dense over the same range.
  static DeltaGrid doubled(int theta_levels = 20, int t_levels = 40);
  DeltaGrid restricted(double theta0) const;
};

struct DeltaNormResult {
  double value = 0.0;
  double theta_star = 0.0;
  double t_star = 0.0;
  double refined_value = 0.0;   // value on the doubled grid
  double certificate = 0.0;     // relative change under doubling
};

// Value and argmax on one grid. Ties go to the largest theta.
DeltaNormResult delta_norm_on(const RearrangementProfile& prof, const TemperedWeight& w,
                              const DeltaGrid& grid);

// Evaluates on `grid` and on `refined`; Instability if they differ by more
// than 0.5%.
DeltaNormResult delta_norm(const RearrangementProfile& prof, const TemperedWeight& w,
                           const DeltaGrid& grid = DeltaGrid::standard(),
                           const DeltaGrid& refined = DeltaGrid::doubled());

DeltaNormResult delta_norm_theta_restricted(const RearrangementProfile& prof,
                                            const TemperedWeight& w, double theta0);

inline constexpr double kDeltaStabilityTol = 5e-3;

}  // namespace nbx
