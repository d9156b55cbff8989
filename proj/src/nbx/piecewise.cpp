#include "nbx/piecewise.hpp"

#include "nbx/dilation_basis.hpp"
#include "nbx/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace nbx {

PiecewiseFunction::PiecewiseFunction(std::vector<Segment> segments, double x_cut,
                                     TailSpec tail)
    : segments_(std::move(segments)), x_cut_(x_cut), tail_(std::move(tail)) {
  require(x_cut_ > 0.0 && x_cut_ < 1.0, ErrorKind::Domain,
          "piecewise function: x_cut must lie in (0,1)");
  require(!segments_.empty(), ErrorKind::Domain, "piecewise function: no segments");
  const double rel = 1e-12;
  require(std::abs(segments_.front().x_hi - 1.0) <= rel &&
              std::abs(segments_.back().x_lo - x_cut_) <= rel * x_cut_ + 1e-300,
          ErrorKind::Domain, "piecewise function: segments must cover (x_cut, 1)");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    require(s.x_lo < s.x_hi, ErrorKind::Domain, "piecewise function: empty segment");
    if (i + 1 < segments_.size())
      require(std::abs(segments_[i + 1].x_hi - s.x_lo) <= rel * s.x_lo,
              ErrorKind::Domain, "piecewise function: segments must be contiguous");
  }
  if (tail_.kind == TailSpec::Kind::Constant) tail_.bound = std::abs(tail_.value);
  require(tail_.samples > 0, ErrorKind::Domain, "piecewise function: tail samples");
}

PiecewiseFunction PiecewiseFunction::constant(double value, double x_cut) {
  Segment s{x_cut, 1.0, value, 0.0, value};
  TailSpec tail;
  tail.value = value;
  return PiecewiseFunction({s}, x_cut, tail);
}

PiecewiseFunction PiecewiseFunction::step(double value, double width, double x_cut) {
  require(width > x_cut && width <= 1.0, ErrorKind::Domain,
          "step: need x_cut < width <= 1");
  std::vector<Segment> segs;
  if (width < 1.0) segs.push_back({width, 1.0, 0.0, 0.0, 0.0});
  segs.push_back({x_cut, width, value, 0.0, value});
  TailSpec tail;
  tail.value = value;
  return PiecewiseFunction(std::move(segs), x_cut, tail);
}

PiecewiseFunction PiecewiseFunction::from_terms(std::vector<Segment> segments,
                                                double x_cut, double tail_value) {
  for (auto& s : segments) s.f_hi = s.alpha + s.beta / s.x_hi;
  TailSpec tail;
  tail.value = tail_value;
  return PiecewiseFunction(std::move(segments), x_cut, tail);
}

namespace {

double residual_tail_value(const TailSpec& t, double x) {
  double acc = 1.0;
  for (std::size_t k = 0; k < t.dilations.size(); ++k)
    acc -= t.coeffs[k] * eval_rho(t.dilations[k], x);
  return t.scale * acc;
}

}  // namespace

double PiecewiseFunction::operator()(double x) const {
  require(x > 0.0 && x <= 1.0, ErrorKind::Domain, "piecewise function: x outside (0,1]");
  if (x <= x_cut_) {
    return tail_.kind == TailSpec::Kind::Constant ? tail_.value
                                                  : residual_tail_value(tail_, x);
  }
  // Segment with x_lo < x <= x_hi; segments are in descending x.
  auto it = std::lower_bound(segments_.begin(), segments_.end(), x,
                             [](const Segment& s, double v) { return s.x_lo >= v; });
  if (it == segments_.end()) it = std::prev(segments_.end());
  return it->value(x);
}

std::vector<double> PiecewiseFunction::tail_samples() const {
  const std::size_t n = tail_.samples;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = x_cut_ * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    out[i] = tail_.kind == TailSpec::Kind::Constant ? tail_.value
                                                    : residual_tail_value(tail_, x);
  }
  return out;
}

double PiecewiseFunction::sup_bound() const {
  double m = tail_.bound;
  for (const auto& s : segments_) {
    m = std::max(m, std::abs(s.f_hi));
    m = std::max(m, std::abs(s.value_u(s.u_hi())));
  }
  return m;
}

PiecewiseFunction PiecewiseFunction::scaled(double c) const {
  PiecewiseFunction out = *this;
  for (auto& s : out.segments_) {
    s.alpha *= c;
    s.beta *= c;
    s.f_hi *= c;
  }
  out.tail_.value *= c;
  out.tail_.scale *= c;
  out.tail_.bound *= std::abs(c);
  return out;
}

namespace {

// int_a^b |F(u)|^p / u^2 du on a piece where F keeps one sign. `zero_lo` /
// `zero_hi` mark an endpoint where F vanishes; non-integer powers get a
// geometric grading there.
double power_piece(const Segment& s, double a, double b, double p, bool zero_lo,
                   bool zero_hi) {
  auto integrand = [&](double u) {
    const double v = std::abs(s.value_u(u));
    return std::pow(v, p) / (u * u);
  };
  const bool smooth = (p == 1.0 || p == 2.0);
  if (smooth) return gauss_legendre_graded<8>(integrand, a, b);
  if (!zero_lo && !zero_hi) {
    // |F|^p has a branch point where the linear F vanishes; when that lies
    // just outside (a, b) a single rule converges slowly, so cells grow
    // geometrically with the distance from it.
    if (s.beta == 0.0) return gauss_legendre_graded<8>(integrand, a, b);
    const double uz = s.u_lo() - s.f_hi / s.beta;
    const double near = uz < a ? a : b;
    const double dist = std::abs(near - uz);
    if (!(dist < b - a)) return gauss_legendre_graded<8>(integrand, a, b);
    CompensatedSum acc;
    const double dir = uz < a ? 1.0 : -1.0;
    double d = dist;
    double cur = near;
    while (true) {
      const double next_d = 1.5 * d;
      double next = uz + dir * next_d;
      const bool last = dir > 0.0 ? next >= b : next <= a;
      if (last) next = dir > 0.0 ? b : a;
      acc += gauss_legendre_graded<8>(integrand, std::min(cur, next), std::max(cur, next));
      if (last) break;
      cur = next;
      d = next_d;
    }
    return acc.value();
  }

  // Grade toward the zero endpoint(s); split at the midpoint when both ends
  // vanish (only for degenerate constant-zero pieces).
  CompensatedSum acc;
  auto graded = [&](double z, double other) {
    const double len = other - z;
    double outer = other;
    for (int j = 1; j <= 48; ++j) {
      const double inner = z + len * std::ldexp(1.0, -j);
      if (!(std::abs(inner - z) > 0.0)) break;
      acc += gauss_legendre_graded<8>(integrand, std::min(inner, outer),
                                      std::max(inner, outer));
      outer = inner;
    }
  };
  if (zero_lo && zero_hi) {
    const double mid = 0.5 * (a + b);
    graded(a, mid);
    graded(b, mid);
  } else if (zero_lo) {
    graded(a, b);
  } else {
    graded(b, a);
  }
  return acc.value();
}

}  // namespace

double head_lp_integral(const PiecewiseFunction& f, double p) {
  require(p >= 1.0, ErrorKind::Domain, "lp norm: p must be >= 1");
  CompensatedSum acc;
  for (const auto& s : f.segments()) {
    const double u0 = s.u_lo();
    const double u1 = s.u_hi();
    const double f0 = s.f_hi;
    const double f1 = s.value_u(u1);
    if (s.beta != 0.0 && ((f0 < 0.0 && f1 > 0.0) || (f0 > 0.0 && f1 < 0.0))) {
      const double uz = std::clamp(u0 - f0 / s.beta, u0, u1);
      acc += power_piece(s, u0, uz, p, false, true);
      acc += power_piece(s, uz, u1, p, true, false);
    } else {
      acc += power_piece(s, u0, u1, p, f0 == 0.0, f1 == 0.0);
    }
  }
  return acc.value();
}

namespace {

double tail_lp_integral(const PiecewiseFunction& f, double p) {
  const auto& t = f.tail();
  if (t.kind == TailSpec::Kind::Constant) return std::pow(std::abs(t.value), p) * f.x_cut();
  CompensatedSum acc;
  const auto samples = f.tail_samples();
  for (double v : samples) acc += std::pow(std::abs(v), p);
  return acc.value() * f.x_cut() / static_cast<double>(samples.size());
}

}  // namespace

double l1_norm(const PiecewiseFunction& f) {
  return head_lp_integral(f, 1.0) + tail_lp_integral(f, 1.0);
}

double l2_norm_sq(const PiecewiseFunction& f) {
  return head_lp_integral(f, 2.0) + tail_lp_integral(f, 2.0);
}

double lp_norm(const PiecewiseFunction& f, double p) {
  return std::pow(head_lp_integral(f, p) + tail_lp_integral(f, p), 1.0 / p);
}

}  // namespace nbx
