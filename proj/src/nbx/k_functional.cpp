#include "nbx/k_functional.hpp"

#include "nbx/numerics.hpp"
#include "nbx/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace nbx {

void ThetaParams::validate() const {
  require(theta > 0.0 && theta < 1.0, ErrorKind::Domain, "theta must lie in (0,1)");
  require(q >= 1.0, ErrorKind::Domain, "q must be >= 1");
}

double ThetaParams::normalization() const {
  if (std::isinf(q)) return 1.0;
  return std::pow((1.0 - theta) * theta * q, 1.0 / q);
}

ThetaParams ThetaParams::from_p(double p, double q, bool normalized) {
  require(p > 1.0 && p < 2.0, ErrorKind::Domain, "p must lie in (1,2)");
  ThetaParams t{2.0 - 2.0 / p, q, normalized};
  return t;
}

double k_l1_l2(const RearrangementProfile& prof, double t) {
  require(t > 0.0, ErrorKind::Domain, "k_l1_l2: t must be positive");
  // For t >= 1 the integral is exactly l1^2 / t^2.
  if (t >= 1.0) return prof.l1_mass();
  return t * std::sqrt(prof.tail_sq_integral(t * t));
}

double k_l1_l2_exact(std::span<const double> values, std::span<const double> masses,
                     double t) {
  require(values.size() == masses.size(), ErrorKind::LengthMismatch,
          "k_l1_l2_exact: values and masses differ in length");
  require(t > 0.0, ErrorKind::Domain, "k_l1_l2_exact: t must be positive");
  double top = 0.0;
  for (double v : values) top = std::max(top, std::abs(v));
  if (top == 0.0) return 0.0;

  auto objective = [&](double lam) {
    CompensatedSum over, sq;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double v = std::abs(values[i]);
      if (v > lam) {
        over += masses[i] * (v - lam);
        sq += masses[i] * lam * lam;
      } else {
        sq += masses[i] * v * v;
      }
    }
    return over.value() + t * std::sqrt(std::max(0.0, sq.value()));
  };

  // Unimodal in the level: the derivative is mass{|f| > lam} (t lam/||g|| - 1).
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = 0.0, hi = top;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = objective(x1), f2 = objective(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * top; ++it) {
    if (f1 <= f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = objective(x2);
    }
  }
  const double best = std::min({f1, f2, objective(0.0), objective(top)});
  if (!std::isfinite(best)) fail(ErrorKind::OptimizationFailure, "k_l1_l2_exact: search failed");
  return best;
}

double k_l1_l2_exact(const RearrangementProfile& prof, double t) {
  std::vector<double> masses(prof.size());
  for (std::size_t i = 0; i < prof.size(); ++i) masses[i] = prof.step_hi(i) - prof.step_lo(i);
  return k_l1_l2_exact(prof.fstar(), masses, t);
}

double j_l1_l2(const PiecewiseFunction& f, double t) {
  require(t > 0.0, ErrorKind::Domain, "j_l1_l2: t must be positive");
  return std::max(l1_norm(f), t * std::sqrt(l2_norm_sq(f)));
}

namespace {

// Below this t the integral int_{t^2} f**^2 equals its value at 0 to 1e-12
// relative.
double flat_start(const RearrangementProfile& prof, double q0) {
  const double f0 = prof.sup();
  if (f0 == 0.0) return 1e-300;
  return std::clamp(std::sqrt(1e-12 * q0) / f0, 1e-300, 0.5);
}

struct SupResult {
  double value, t;
};

SupResult sup_on_grid(const RearrangementProfile& prof, double theta, double t_lo,
                      std::size_t points) {
  auto g = [&](double t) { return std::pow(t, -theta) * k_l1_l2(prof, t); };
  const double l0 = std::log(t_lo);
  std::vector<double> ts(points);
  std::size_t arg = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < points; ++i) {
    ts[i] = std::exp(l0 * (1.0 - static_cast<double>(i) / static_cast<double>(points - 1)));
    const double v = g(ts[i]);
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  double best_t = ts[arg];
  // Golden-section refinement on the neighbouring cells.
  double a = std::log(ts[arg > 0 ? arg - 1 : 0]);
  double b = std::log(ts[arg + 1 < points ? arg + 1 : arg]);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = g(std::exp(x1)), f2 = g(std::exp(x2));
  for (int it = 0; it < 80 && b - a > 1e-13; ++it) {
    if (f1 >= f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - phi * (b - a);
      f1 = g(std::exp(x1));
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + phi * (b - a);
      f2 = g(std::exp(x2));
    }
  }
  if (f1 > best) { best = f1; best_t = std::exp(x1); }
  if (f2 > best) { best = f2; best_t = std::exp(x2); }
  return {best, best_t};
}

}  // namespace

ThetaNormResult theta_q_norm_detail(const RearrangementProfile& prof,
                                    const ThetaParams& params, NormVariant variant) {
  params.validate();
  const double theta = params.theta;
  const double q0 = prof.tail_sq_integral(0.0);
  require(std::isfinite(q0), ErrorKind::Divergence, "theta norm: f** not square integrable");
  ThetaNormResult out;
  if (q0 == 0.0) return out;
  const double t_lo = flat_start(prof, q0);
  const double m = prof.l1_mass();

  if (std::isinf(params.q)) {
    // t^{-theta} K(t) = t^{-theta} m decreases on [1, inf), so both variants
    // are the sup over (0, 1].
    auto r = sup_on_grid(prof, theta, t_lo, 512);
    const auto r2 = sup_on_grid(prof, theta, t_lo, 1024);
    if (m > r.value) r = {m, 1.0};
    out.value = std::max(r.value, r2.value);
    out.t_star = r.value >= r2.value ? r.t : r2.t;
    out.certificate = std::abs(r2.value - r.value) / out.value;
    return out;
  }

  const double q = params.q;
  // int_0^1 (t^{-theta} K(t))^q dt/t in y = log t.
  auto integrand = [&](double y) {
    const double t = std::exp(y);
    return std::pow(std::pow(t, 1.0 - theta) * std::sqrt(prof.tail_sq_integral(t * t)), q);
  };
  CompensatedSum acc;
  const double y0 = std::log(t_lo);
  const int panels = std::max(64, static_cast<int>(std::ceil(-y0 / 0.05)));
  for (int i = 0; i < panels; ++i) {
    const double a = y0 * (1.0 - static_cast<double>(i) / panels);
    const double b = y0 * (1.0 - static_cast<double>(i + 1) / panels);
    acc += gauss_legendre<8>(integrand, a, b);
  }
  // (0, t_lo): the inner integral is flat there.
  const double e = (1.0 - theta) * q;
  acc += std::pow(q0, 0.5 * q) * std::exp(e * y0) / e;
  double total = acc.value();
  if (variant == NormVariant::Full) total += std::pow(m, q) / (theta * q);
  require(std::isfinite(total), ErrorKind::Divergence, "theta norm: integral diverged");
  out.value = std::pow(total, 1.0 / q) * (params.normalized ? params.normalization() : 1.0);
  return out;
}

double theta_q_norm(const RearrangementProfile& prof, const ThetaParams& params,
                    NormVariant variant) {
  return theta_q_norm_detail(prof, params, variant).value;
}

}  // namespace nbx
