#include "nbx/extrapolation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace nbx {

TemperedWeight::TemperedWeight(Kind k, double alpha) : kind_(k), alpha_(alpha) { certify(); }

TemperedWeight TemperedWeight::one() { return TemperedWeight(Kind::One, 0.0); }

TemperedWeight TemperedWeight::power(double alpha) {
  require(alpha > 0.0 && std::isfinite(alpha), ErrorKind::Config,
          "power weight: alpha must be positive");
  return TemperedWeight(Kind::Power, alpha);
}

TemperedWeight TemperedWeight::log_damp() { return TemperedWeight(Kind::LogDamp, 0.0); }

TemperedWeight TemperedWeight::parse(std::string_view spec) {
  if (spec == "one") return one();
  if (spec == "logdamp") return log_damp();
  constexpr std::string_view prefix = "power:";
  if (spec.substr(0, prefix.size()) == prefix) {
    const auto rest = spec.substr(prefix.size());
    double alpha = 0.0;
    const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), alpha);
    if (ec != std::errc{} || ptr != rest.data() + rest.size())
      fail(ErrorKind::Config, "weight: malformed power exponent");
    return power(alpha);
  }
  fail(ErrorKind::Config, "weight: expected one, power:<alpha> or logdamp");
}

double TemperedWeight::operator()(double theta) const {
  require(theta > 0.0 && theta < 1.0, ErrorKind::Domain, "weight: theta must lie in (0,1)");
  switch (kind_) {
    case Kind::One:
      return 1.0;
    case Kind::Power:
      return std::pow(1.0 - theta, alpha_);
    case Kind::LogDamp:
      return 1.0 / (1.0 + std::abs(std::log1p(-theta)));
  }
  return 1.0;
}

std::string TemperedWeight::id() const {
  switch (kind_) {
    case Kind::One:
      return "one";
    case Kind::LogDamp:
      return "logdamp";
    case Kind::Power: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "power:%.17g", alpha_);
      return buf;
    }
  }
  return "one";
}

void TemperedWeight::certify() {
  // theta = 1 - 10^{-k/4}, k = 4..24, covers [0.9, 1 - 1e-6].
  double c = 1.0;
  std::size_t n = 0;
  for (int k = 4; k <= 24; ++k) {
    const double theta = 1.0 - std::pow(10.0, -k / 4.0);
    const double m0 = (*this)(theta);
    const double m1 = (*this)(0.5 * (1.0 + theta));
    require(m0 > 0.0 && m1 > 0.0 && std::isfinite(m0) && std::isfinite(m1), ErrorKind::Config,
            "weight: not positive near 1");
    const double r = m1 / m0;
    c = std::max({c, r, 1.0 / r});
    ++n;
  }
  require(c <= kTemperCap, ErrorKind::Config, "weight: not tempered at 1 on the sampling grid");
  cert_.c_t = c;
  cert_.samples = n;
}

double omega_from_weight(const TemperedWeight& w, double p) {
  require(p > 1.0 && p < 2.0, ErrorKind::Domain, "omega: p must lie in (1,2)");
  return w(2.0 - 2.0 / p);
}

DeltaGrid DeltaGrid::standard(int theta_levels, int t_levels) {
  require(theta_levels >= 1 && t_levels >= 0, ErrorKind::Config, "delta grid: bad sizes");
  DeltaGrid g;
  for (int j = 1; j <= theta_levels; ++j) g.theta.push_back(1.0 - std::ldexp(1.0, -j));
  for (int i = 0; i <= t_levels; ++i) g.t.push_back(std::exp2(-0.5 * i));
  return g;
}

DeltaGrid DeltaGrid::doubled(int theta_levels, int t_levels) {
  require(theta_levels >= 1 && t_levels >= 0, ErrorKind::Config, "delta grid: bad sizes");
  DeltaGrid g;
  for (int j = 2; j <= 2 * theta_levels; ++j) g.theta.push_back(1.0 - std::exp2(-0.5 * j));
  for (int i = 0; i <= 2 * t_levels; ++i) g.t.push_back(std::exp2(-0.25 * i));
  return g;
}

DeltaGrid DeltaGrid::restricted(double theta0) const {
  require(theta0 > 0.0 && theta0 < 1.0, ErrorKind::Domain, "theta0 must lie in (0,1)");
  DeltaGrid g;
  g.t = t;
  for (double th : theta)
    if (th > theta0) g.theta.push_back(th);
  return g;
}

DeltaNormResult delta_norm_on(const RearrangementProfile& prof, const TemperedWeight& w,
                              const DeltaGrid& grid) {
  DeltaNormResult r;
  r.value = -1.0;
  const std::size_t nt = grid.t.size();
  std::vector<double> root_q(nt);
  for (std::size_t i = 0; i < nt; ++i)
    root_q[i] = std::sqrt(prof.tail_sq_integral(grid.t[i] * grid.t[i]));
  for (double th : grid.theta) {
    const double m = w(th);
    auto value_at = [&](double t) {
      return m * std::pow(t, 1.0 - th) * std::sqrt(prof.tail_sq_integral(t * t));
    };
    std::size_t best = 0;
    double best_v = -1.0;
    for (std::size_t i = 0; i < nt; ++i) {
      const double v = m * std::pow(grid.t[i], 1.0 - th) * root_q[i];
      if (v >= best_v) {
        best_v = v;
        best = i;
      }
    }
    double t_best = nt ? grid.t[best] : 1.0;
    // Golden refinement in log t between the grid neighbours of the row maximum.
    if (nt >= 2 && best_v > 0.0) {
      const double t_hi = best == 0 ? grid.t[0] : grid.t[best - 1];
      const double t_lo = best + 1 < nt ? grid.t[best + 1] : grid.t[best];
      double a = std::log(std::min(t_lo, t_hi)), b = std::log(std::max(t_lo, t_hi));
      const double g = 0.5 * (std::sqrt(5.0) - 1.0);
      double x1 = b - g * (b - a), x2 = a + g * (b - a);
      double f1 = value_at(std::exp(x1)), f2 = value_at(std::exp(x2));
      for (int it = 0; it < 40 && b - a > 1e-10; ++it) {
        if (f1 < f2) {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + g * (b - a);
          f2 = value_at(std::exp(x2));
        } else {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - g * (b - a);
          f1 = value_at(std::exp(x1));
        }
      }
      const double xm = f1 > f2 ? x1 : x2;
      const double vm = std::max(f1, f2);
      if (vm > best_v) {
        best_v = vm;
        t_best = std::min(1.0, std::exp(xm));
      }
    }
    if (best_v >= r.value) {
      r.value = best_v;
      r.theta_star = th;
      r.t_star = t_best;
    }
  }
  if (r.value < 0.0) r.value = 0.0;
  r.refined_value = r.value;
  return r;
}

DeltaNormResult delta_norm(const RearrangementProfile& prof, const TemperedWeight& w,
                           const DeltaGrid& grid, const DeltaGrid& refined) {
  DeltaNormResult r = delta_norm_on(prof, w, grid);
  const DeltaNormResult r2 = delta_norm_on(prof, w, refined);
  r.refined_value = r2.value;
  r.certificate = r.value > 0.0 ? std::abs(r2.value - r.value) / r.value : 0.0;
  if (r.certificate > kDeltaStabilityTol)
    fail(ErrorKind::Instability, "delta norm: value moved by more than 0.5% under grid doubling");
  return r;
}

DeltaNormResult delta_norm_theta_restricted(const RearrangementProfile& prof,
                                            const TemperedWeight& w, double theta0) {
  return delta_norm(prof, w, DeltaGrid::standard().restricted(theta0),
                    DeltaGrid::doubled().restricted(theta0));
}

}  // namespace nbx
