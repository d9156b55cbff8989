#include "nbx/rearrangement.hpp"

#include "nbx/numerics.hpp"
#include "nbx/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

namespace nbx {

RearrangementProfile RearrangementProfile::from_steps(std::vector<double> values,
                                                      std::vector<double> masses,
                                                      std::vector<StepSource> sources) {
  require(values.size() == masses.size(), ErrorKind::LengthMismatch,
          "profile: values and masses differ in length");
  require(sources.empty() || sources.size() == values.size(), ErrorKind::LengthMismatch,
          "profile: sources length");
  require(!values.empty(), ErrorKind::Domain, "profile: no steps");
  CompensatedSum total;
  for (std::size_t i = 0; i < values.size(); ++i) {
    require(masses[i] > 0.0 && std::isfinite(masses[i]), ErrorKind::Domain,
            "profile: masses must be positive");
    require(std::isfinite(values[i]), ErrorKind::Domain, "profile: non-finite value");
    total += masses[i];
  }
  const double scale = 1.0 / total.value();

  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return std::abs(values[l]) > std::abs(values[r]);
  });

  RearrangementProfile p;
  const std::size_t n = values.size();
  p.bounds_.resize(n + 1);
  p.values_.resize(n);
  if (!sources.empty()) p.sources_.resize(n);
  CompensatedSum s;
  p.bounds_[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = order[i];
    p.values_[i] = std::abs(values[j]);
    s += masses[j] * scale;
    p.bounds_[i + 1] = s.value();
    if (!sources.empty()) p.sources_[i] = sources[j];
  }
  p.bounds_[n] = 1.0;
  p.finalize();
  return p;
}

void RearrangementProfile::finalize() {
  const std::size_t n = values_.size();
  cum_.assign(n + 1, 0.0);
  CompensatedSum c, q;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = bounds_[i + 1] - bounds_[i];
    c += values_[i] * m;
    q += values_[i] * values_[i] * m;
    cum_[i + 1] = c.value();
  }
  l1_ = c.value();
  l2sq_ = q.value();

  // Per-step closed forms with f** = (A + B s) / s on the step.
  suffix_sq_.assign(n + 1, 0.0);
  suffix_inv_.assign(n + 1, 0.0);
  CompensatedSum sq, inv;
  for (std::size_t k = n; k-- > 0;) {
    const double a = bounds_[k];
    const double b = bounds_[k + 1];
    const double B = values_[k];
    const double A = cum_[k] - B * a;
    if (a == 0.0) {
      sq += B * B * b;
      // int_0^b B / s ds diverges; the first step is only reached via
      // tail_star_over_s with tau > 0.
      suffix_sq_[k] = sq.value();
      suffix_inv_[k] = std::numeric_limits<double>::infinity();
      continue;
    }
    sq += A * A * (1.0 / a - 1.0 / b) + 2.0 * A * B * std::log(b / a) + B * B * (b - a);
    inv += A * (1.0 / a - 1.0 / b) + B * std::log(b / a);
    suffix_sq_[k] = sq.value();
    suffix_inv_[k] = inv.value();
  }
}

std::size_t RearrangementProfile::step_index(double s) const {
  if (s >= 1.0) return values_.size();
  // First bound >= s, step is the one ending there.
  auto it = std::lower_bound(bounds_.begin() + 1, bounds_.end(), s);
  return static_cast<std::size_t>(it - bounds_.begin()) - 1;
}

double RearrangementProfile::fstar_at(double s) const {
  require(s >= 0.0, ErrorKind::Domain, "fstar: s must be >= 0");
  if (s >= 1.0) return 0.0;
  return values_[step_index(std::max(s, 0.0))];
}

double RearrangementProfile::k_l1_linf(double s) const {
  require(s > 0.0, ErrorKind::Domain, "k_l1_linf: s must be positive");
  if (s >= 1.0) return l1_;
  const std::size_t i = step_index(s);
  return cum_[i] + values_[i] * (s - bounds_[i]);
}

double RearrangementProfile::double_star(double s) const {
  require(s > 0.0, ErrorKind::Domain, "double_star: s must be positive");
  if (s >= 1.0) return l1_ / s;
  return k_l1_linf(s) / s;
}

double RearrangementProfile::tail_sq_integral(double tau) const {
  require(tau >= 0.0, ErrorKind::Domain, "tail integral: tau must be >= 0");
  const double m2 = l1_ * l1_;
  if (tau >= 1.0) return m2 / tau;
  const std::size_t i = step_index(tau);
  const double a = std::max(tau, bounds_[i]);
  const double b = bounds_[i + 1];
  const double B = values_[i];
  const double A = cum_[i] - B * bounds_[i];
  double part;
  if (a == 0.0)
    part = B * B * b;
  else
    part = A * A * (1.0 / a - 1.0 / b) + 2.0 * A * B * std::log(b / a) + B * B * (b - a);
  return part + suffix_sq_[i + 1] + m2;
}

double RearrangementProfile::tail_star_over_s(double tau) const {
  require(tau > 0.0, ErrorKind::Domain, "tail integral: tau must be positive");
  if (tau >= 1.0) return l1_ / tau;
  const std::size_t i = step_index(tau);
  const double a = std::max(tau, bounds_[i]);
  const double b = bounds_[i + 1];
  const double B = values_[i];
  const double A = cum_[i] - B * bounds_[i];
  const double part = A * (1.0 / a - 1.0 / b) + B * std::log(b / a);
  return part + suffix_inv_[i + 1] + l1_;
}

RearrangementProfile RearrangementProfile::scaled(double c) const {
  RearrangementProfile p = *this;
  const double a = std::abs(c);
  for (auto& v : p.values_) v *= a;
  if (c < 0.0)
    for (auto& s : p.sources_) s.sign = -s.sign;
  p.finalize();
  return p;
}

void RearrangementProfile::write_csv(std::ostream& out) const {
  out << "s,fstar,fstarstar\n";
  char buf[128];
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double s = bounds_[i + 1];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s, values_[i], cum_[i + 1] / s);
    out << buf;
  }
}

namespace {

struct StepList {
  std::vector<double> values, masses;
  std::vector<StepSource> sources;
};

// Two half-mass steps carrying the first two moments of |F| on (ua, ub).
void add_cell(StepList& out, const Segment& seg, double ua, double ub, double sign,
              bool keep_sources) {
  const double mass = (ub - ua) / (ua * ub);
  const double m1 = gauss_legendre_graded<8>(
      [&](double u) { return std::abs(seg.value_u(u)) / (u * u); }, ua, ub);
  const double mu = m1 / mass;
  // Central second moment in a separate pass; E[F^2] - mu^2 loses half the
  // digits when |F| is nearly flat on the cell.
  const double m2c = gauss_legendre_graded<8>(
      [&](double u) {
        const double d = std::abs(seg.value_u(u)) - mu;
        return d * d / (u * u);
      },
      ua, ub);
  const double var = std::max(0.0, m2c / mass);
  const double sd = std::min(std::sqrt(var), mu);
  out.values.push_back(mu + sd);
  out.values.push_back(mu - sd);
  out.masses.push_back(0.5 * mass);
  out.masses.push_back(0.5 * mass);
  if (keep_sources) {
    // The larger half sits toward the end where |F| is larger.
    const bool rising = std::abs(seg.value_u(ub)) >= std::abs(seg.value_u(ua));
    const double um = 0.5 * (ua + ub);
    const double uq_hi = rising ? 0.5 * (um + ub) : 0.5 * (ua + um);
    const double uq_lo = rising ? 0.5 * (ua + um) : 0.5 * (um + ub);
    out.sources.push_back({uq_hi, sign});
    out.sources.push_back({uq_lo, sign});
  }
}

void add_piece(StepList& out, const Segment& seg, double ua, double ub, double scale,
               std::size_t grid_size, bool keep_sources) {
  if (!(ub > ua)) return;
  const double fa = seg.value_u(ua);
  const double fb = seg.value_u(ub);
  const double mid = seg.value_u(0.5 * (ua + ub));
  const double sign = mid >= 0.0 ? 1.0 : -1.0;
  const double g = static_cast<double>(grid_size);
  const double by_log = std::log(ub / ua) / std::log1p(8.0 / g);
  const double by_var = scale > 0.0 ? g * std::abs(fb - fa) / (2.0 * scale) : 0.0;
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(std::max(by_log, by_var))));
  // Cells geometric in u.
  const double r = std::pow(ub / ua, 1.0 / static_cast<double>(n));
  double lo = ua;
  for (std::size_t i = 0; i < n; ++i) {
    const double hi = (i + 1 == n) ? ub : lo * r;
    add_cell(out, seg, lo, hi, sign, keep_sources);
    lo = hi;
  }
}

RearrangementProfile build(const PiecewiseFunction& f, std::size_t grid_size,
                           bool keep_sources) {
  StepList steps;
  const double scale = f.sup_bound();
  for (const auto& seg : f.segments()) {
    const double u0 = seg.u_lo();
    const double u1 = seg.u_hi();
    const double f0 = seg.f_hi;
    const double f1 = seg.value_u(u1);
    if (seg.beta != 0.0 && ((f0 < 0.0 && f1 > 0.0) || (f0 > 0.0 && f1 < 0.0))) {
      const double uz = std::clamp(u0 - f0 / seg.beta, u0, u1);
      add_piece(steps, seg, u0, uz, scale, grid_size, keep_sources);
      add_piece(steps, seg, uz, u1, scale, grid_size, keep_sources);
    } else {
      add_piece(steps, seg, u0, u1, scale, grid_size, keep_sources);
    }
  }
  const auto tail = f.tail_samples();
  const double tm = f.x_cut() / static_cast<double>(tail.size());
  for (std::size_t i = 0; i < tail.size(); ++i) {
    steps.values.push_back(std::abs(tail[i]));
    steps.masses.push_back(tm);
    if (keep_sources) {
      const double x = f.x_cut() * (static_cast<double>(i) + 0.5) /
                       static_cast<double>(tail.size());
      steps.sources.push_back({1.0 / x, tail[i] >= 0.0 ? 1.0 : -1.0});
    }
  }
  return RearrangementProfile::from_steps(std::move(steps.values), std::move(steps.masses),
                                          std::move(steps.sources));
}

}  // namespace

RearrangementProfile rearrange(const PiecewiseFunction& f, std::size_t grid_size,
                               const RearrangeOptions& opts) {
  require(grid_size >= 16, ErrorKind::Domain, "rearrange: grid_size must be >= 16");
  RearrangementProfile p = build(f, grid_size, opts.keep_sources);
  RearrangeCertificate cert;
  cert.grid_size = grid_size;
  if (opts.certify) {
    const double l1 = p.l1_mass();
    const double l1_2 = build(f, 2 * grid_size, false).l1_mass();
    cert.refinements = 1;
    cert.l1_change = std::abs(l1_2 - l1);
    if (!(cert.l1_change < opts.certificate_tol)) {
      const double l1_4 = build(f, 4 * grid_size, false).l1_mass();
      cert.refinements = 2;
      cert.l1_change = std::abs(l1_4 - l1_2);
      if (!(cert.l1_change < opts.certificate_tol))
        fail(ErrorKind::NonConvergence, "rearrange: l1 mass not stable under grid doubling");
    }
  }
  p.set_certificate(cert);
  return p;
}

}  // namespace nbx
