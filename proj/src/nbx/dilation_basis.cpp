#include "nbx/dilation_basis.hpp"

#include "nbx/numerics.hpp"
#include "nbx/piecewise.hpp"

#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/factorials.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>

namespace nbx {

// ---------------------------------------------------------------------------
// DilationBasis

DilationBasis::DilationBasis(std::vector<double> d) : dilations_(std::move(d)) {
  for (std::size_t k = 0; k < dilations_.size(); ++k) {
    const double a = dilations_[k];
    require(std::isfinite(a) && a >= 1.0, ErrorKind::Domain, "dilations must be >= 1");
    if (k > 0)
      require(a > dilations_[k - 1], ErrorKind::Domain,
              "dilations must be strictly increasing");
    if (a != std::floor(a)) all_integer_ = false;
  }
}

DilationBasis DilationBasis::integers(std::size_t n) {
  std::vector<double> d(n);
  std::iota(d.begin(), d.end(), 1.0);
  return DilationBasis(std::move(d));
}

DilationBasis DilationBasis::from(std::vector<double> dilations) {
  return DilationBasis(std::move(dilations));
}

DilationBasis DilationBasis::prefix(std::size_t n) const {
  require(n <= size(), ErrorKind::LengthMismatch, "basis prefix longer than basis");
  return DilationBasis(std::vector<double>(dilations_.begin(), dilations_.begin() + n));
}

bool CoefficientVector::phi_member(double tol) const {
  return std::abs(constraint_residual) <= tol;
}

double eval_rho(double a, double x) {
  if (!(a >= 1.0)) fail(ErrorKind::Domain, "eval_rho: dilation must be >= 1");
  if (!(x > 0.0 && x <= 1.0)) fail(ErrorKind::Domain, "eval_rho: x must lie in (0,1]");
  return fractional_part(1.0 / (a * x));
}

std::vector<double> breakpoints(double a, double x_cut) {
  require(a >= 1.0, ErrorKind::Domain, "breakpoints: dilation must be >= 1");
  require(x_cut > 0.0 && x_cut < 1.0, ErrorKind::Domain, "breakpoints: x_cut in (0,1)");
  std::vector<double> out;
  for (double m = 1.0;; m += 1.0) {
    const double x = 1.0 / (a * m);
    if (!(x > x_cut)) break;
    out.push_back(x);
  }
  return out;
}

double constraint_weight(const DilationBasis& basis, std::size_t k) {
  // Integer bases lie in the closed span exactly; otherwise every term,
  // integer dilations included, carries frac(1/a_k).
  if (basis.all_integer()) return 0.0;
  return fractional_part(1.0 / basis[k]);
}

double phi_constraint_residual(const DilationBasis& basis, std::span<const double> coeffs) {
  if (basis.all_integer()) {
    require(coeffs.size() == basis.size(), ErrorKind::LengthMismatch,
            "coefficient vector length does not match basis");
    return 0.0;
  }
  require(coeffs.size() == basis.size(), ErrorKind::LengthMismatch,
          "coefficient vector length does not match basis");
  CompensatedSum acc;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    acc += coeffs[k] * constraint_weight(basis, k);
  }
  return acc.value();
}

CoefficientVector make_coefficients(const DilationBasis& basis, std::vector<double> coeffs) {
  CoefficientVector cv;
  cv.constraint_residual = phi_constraint_residual(basis, coeffs);
  cv.coeffs = std::move(coeffs);
  return cv;
}

// ---------------------------------------------------------------------------
// Pairings

namespace {

// Weight of the u-integral: u^{-2} for plain pairings, -log(u) u^{-2} when one
// factor is chi * log x.
enum class Kernel { InvSq, LogInvSq };

double kernel_value(Kernel k, double z) {
  return k == Kernel::InvSq ? 1.0 / (z * z) : -std::log(z) / (z * z);
}

// int_z^inf kernel.
double kernel_tail(Kernel k, double z) {
  return k == Kernel::InvSq ? 1.0 / z : -(std::log(z) + 1.0) / z;
}

// A sawtooth factor u/a - floor(u/a), or the constant 1 when the atom is a
// characteristic function.
struct Factor {
  bool constant = true;
  double a = 1.0;
};

Factor factor_of(Atom atom) {
  if (atom.kind == Atom::Kind::Rho) {
    require(atom.dilation >= 1.0 && std::isfinite(atom.dilation), ErrorKind::Domain,
            "inner_product: dilation must be >= 1");
    return {false, atom.dilation};
  }
  return {true, 1.0};
}

// Integer pair (p, q) with b/a = p/q, if the ratio is recognisably rational.
std::optional<std::pair<long long, long long>> rational_ratio(double a, double b,
                                                              long long max_den) {
  if (a == std::floor(a) && b == std::floor(b) && a < 9e15 && b < 9e15) {
    const auto ia = static_cast<long long>(a);
    const auto ib = static_cast<long long>(b);
    const long long g = std::gcd(ia, ib);
    return std::make_pair(ib / g, ia / g);
  }
  const double r = b / a;
  // Continued-fraction convergents of r.
  long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double x = r;
  for (int it = 0; it < 64; ++it) {
    const double fl = std::floor(x);
    if (fl > 9e15) break;
    const auto q = static_cast<long long>(fl);
    const long long h2 = q * h1 + h0;
    const long long k2 = q * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1; h1 = h2; k0 = k1; k1 = k2;
    const double approx = static_cast<double>(h1) / static_cast<double>(k1);
    if (std::abs(approx - r) <= 8.0 * std::numeric_limits<double>::epsilon() * r)
      return std::make_pair(h1, k1);
    const double frac = x - fl;
    if (frac == 0.0) break;
    x = 1.0 / frac;
  }
  return std::nullopt;
}

// Visits the pieces of (u0, u1) on which both factors are affine, passing the
// piece bounds and the last breakpoint of each factor (p with factor
// (u - p) / a). Returns the number of pieces.
template <class Visit>
std::size_t for_each_piece(const Factor& fa, const Factor& fb, double u0, double u1,
                           Visit&& visit) {
  auto start_index = [](const Factor& f, double u) {
    return f.constant ? 0.0 : std::floor(u / f.a);
  };
  double ma = start_index(fa, u0);
  double mb = start_index(fb, u0);
  // Guard against u0 / a rounding just below an exact multiple.
  if (!fa.constant && fa.a * (ma + 1.0) <= u0) ma += 1.0;
  if (!fb.constant && fb.a * (mb + 1.0) <= u0) mb += 1.0;
  const double inf = std::numeric_limits<double>::infinity();
  std::size_t pieces = 0;
  double lo = u0;
  while (lo < u1) {
    const double na = fa.constant ? inf : fa.a * (ma + 1.0);
    const double nb = fb.constant ? inf : fb.a * (mb + 1.0);
    const double next = std::min({na, nb, u1});
    if (next > lo) {
      visit(lo, next, fa.a * ma, fb.a * mb);
      ++pieces;
    }
    if (na <= next) ma += 1.0;
    if (nb <= next) mb += 1.0;
    lo = next;
  }
  return pieces;
}

double factor_value(const Factor& f, double u, double p) {
  return f.constant ? 1.0 : (u - p) / f.a;
}

struct HeadResult {
  double value;
  std::size_t pieces;
};

HeadResult head_integral(const Factor& fa, const Factor& fb, Kernel kern, double u0,
                         double u1) {
  CompensatedSum acc;
  const std::size_t n = for_each_piece(fa, fb, u0, u1, [&](double lo, double hi, double pa,
                                                           double pb) {
    acc += gauss_legendre_graded<8>(
        [&](double u) {
          return factor_value(fa, u, pa) * factor_value(fb, u, pb) * kernel_value(kern, u);
        },
        lo, hi);
  });
  return {acc.value(), n};
}

constexpr int kMaxEmOrder = 9;

struct DerivTables {
  // fact[i] = i!, harm[n] = H_{n+1} - 1
  std::array<double, 2 * kMaxEmOrder + 2> fact{};
  std::array<double, 2 * kMaxEmOrder + 1> harm{};
  DerivTables() {
    fact[0] = 1.0;
    for (std::size_t i = 1; i < fact.size(); ++i) fact[i] = fact[i - 1] * static_cast<double>(i);
    double h = 0.0;
    for (std::size_t n = 0; n < harm.size(); ++n) {
      if (n > 0) h += 1.0 / static_cast<double>(n + 1);
      harm[n] = h;
    }
  }
};
const DerivTables tables;

struct EmResult {
  double value = 0.0;
  double bound = std::numeric_limits<double>::infinity();
  int order = 0;
};

// sum_{k>=0} int_U^{U+P} F(v) kernel(v + kP) dv by Euler-Maclaurin in k.
EmResult euler_maclaurin_tail(const Factor& fa, const Factor& fb, Kernel kern, double U,
                              double P) {
  constexpr int nd = 2 * kMaxEmOrder;  // derivatives 0..nd-1
  std::array<CompensatedSum, nd> deriv;
  CompensatedSum antideriv;
  for_each_piece(fa, fb, U, U + P, [&](double lo, double hi, double pa, double pb) {
    // Small panels: the kernel derivatives are steep, up to z^{-20}.
    double a = lo;
    while (a < hi) {
      double b = std::min(hi, a * (1.0 + 0.05));
      if (!(b > a)) b = hi;
      constexpr unsigned pts = 10;
      using rule = boost::math::quadrature::gauss<double, pts>;
      const auto& xs = rule::abscissa();
      const auto& ws = rule::weights();
      const double c = 0.5 * (a + b);
      const double h = 0.5 * (b - a);
      auto node = [&](double u, double w) {
        const double F = w * factor_value(fa, u, pa) * factor_value(fb, u, pb);
        antideriv += F * kernel_tail(kern, u);
        // z^{-n-2} by repeated multiplication; the log kernel adds the
        // (log z - (H_{n+1} - 1)) factor.
        const double inv = 1.0 / u;
        const double lz = kern == Kernel::LogInvSq ? std::log(u) : 0.0;
        double pw = inv * inv;
        for (int n = 0; n < nd; ++n) {
          const double base = ((n % 2 == 0) ? 1.0 : -1.0) * tables.fact[n + 1] * pw;
          deriv[n] += F * (kern == Kernel::InvSq ? base : -base * (lz - tables.harm[n]));
          pw *= inv;
        }
      };
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] == 0.0) {
          node(c, h * ws[i]);
        } else {
          node(c - h * xs[i], h * ws[i]);
          node(c + h * xs[i], h * ws[i]);
        }
      }
      a = b;
    }
  });

  const double base = antideriv.value() / P + 0.5 * deriv[0].value();
  EmResult best;
  double partial = base;
  for (int j = 1; j <= kMaxEmOrder; ++j) {
    const double b2j = boost::math::bernoulli_b2n<double>(j);
    const double fact = boost::math::factorial<double>(static_cast<unsigned>(2 * j));
    const double dj = std::pow(P, 2 * j - 1) * deriv[2 * j - 1].value();
    partial -= b2j / fact * dj;
    // With f^{(2J)} of one sign, |R_J| <= |B_2J| / (2J)! * |f^{(2J-1)}(0)|.
    const double bound = std::abs(b2j) / fact * std::abs(dj);
    if (bound < best.bound) {
      best.value = partial;
      best.bound = bound;
      best.order = j;
    }
  }
  return best;
}

// Smallest u beyond which the kernel derivatives used in the remainder bound
// keep one sign.
double sign_definite_start(Kernel kern) {
  if (kern == Kernel::InvSq) return 0.0;
  double h = 0.0;
  for (int i = 2; i <= 2 * kMaxEmOrder + 1; ++i) h += 1.0 / i;
  return std::exp(h) * 1.5;
}

double pairing_from(const Factor& fa, const Factor& fb, Kernel kern, double u_start,
                    double tol, const PairingOptions& opts, PairingStats* stats) {
  require(tol > 0.0, ErrorKind::Domain, "inner_product: tol must be positive");
  require(u_start >= 1.0, ErrorKind::Domain, "pairing: u_start must be >= 1");
  PairingStats local;

  // Common period of the product in u.
  std::optional<double> period;
  if (fa.constant && fb.constant) {
    period = 1.0;
  } else if (fa.constant || fb.constant) {
    period = fa.constant ? fb.a : fa.a;
  } else if (auto r = rational_ratio(fa.a, fb.a, opts.max_ratio_denominator)) {
    // b/a = p/q => a p = b q is a common period.
    const double P = fa.a * static_cast<double>(r->first);
    const double per_period = static_cast<double>(r->first + r->second);
    if (per_period * 4.0 < static_cast<double>(opts.segment_budget)) period = P;
  }

  if (!period) {
    // No period: integrand in [0, 1), tail int_U^inf u^{-2} bounded by 1/U.
    require(kern == Kernel::InvSq, ErrorKind::ToleranceNotReached,
            "pairing: log generator needs commensurate dilations");
    const double U = std::max(u_start, 1.0 / tol);
    const double density = 1.0 / fa.a + 1.0 / fb.a;
    if ((U - u_start) * density > static_cast<double>(opts.segment_budget))
      fail(ErrorKind::ToleranceNotReached,
           "pairing: incommensurate dilations need more segments than the budget");
    const auto head = head_integral(fa, fb, kern, u_start, U);
    local.segments = head.pieces;
    local.tail_start = U;
    local.tail_bound = 0.5 / U;
    if (stats) *stats = local;
    return head.value + 0.5 / U;
  }

  const double P = *period;
  local.period = P;
  double U = std::max({u_start, 4.0 * P, sign_definite_start(kern)});
  CompensatedSum total;
  auto head = head_integral(fa, fb, kern, u_start, U);
  total += head.value;
  local.segments = head.pieces;
  const double per_unit = (fa.constant ? 0.0 : 1.0 / fa.a) + (fb.constant ? 0.0 : 1.0 / fb.a);
  for (;;) {
    const auto em = euler_maclaurin_tail(fa, fb, kern, U, P);
    if (em.bound <= 0.5 * tol) {
      local.tail_start = U;
      local.tail_bound = em.bound;
      local.em_order = em.order;
      if (stats) *stats = local;
      return total.value() + em.value;
    }
    const double next = 2.0 * U;
    if ((next - u_start) * std::max(per_unit, 1.0 / P) > static_cast<double>(opts.segment_budget))
      fail(ErrorKind::ToleranceNotReached,
           "pairing: tail bound not certified within the segment budget");
    head = head_integral(fa, fb, kern, U, next);
    total += head.value;
    local.segments += head.pieces;
    U = next;
  }
}

}  // namespace

double inner_product(Atom lhs, Atom rhs, double tol, const PairingOptions& opts,
                     PairingStats* stats) {
  using K = Atom::Kind;
  require(tol > 0.0, ErrorKind::Domain, "inner_product: tol must be positive");
  const bool log_l = lhs.kind == K::LogChi;
  const bool log_r = rhs.kind == K::LogChi;
  if (log_l && log_r) return 2.0;  // int_0^1 log^2 x dx
  if (log_l || log_r) {
    const Atom other = log_l ? rhs : lhs;
    if (other.kind == K::Chi) return -1.0;  // int_0^1 log x dx
    const Factor chi{true, 1.0};
    return pairing_from(chi, factor_of(other), Kernel::LogInvSq, 1.0, tol, opts, stats);
  }
  return pairing_from(factor_of(lhs), factor_of(rhs), Kernel::InvSq, 1.0, tol, opts, stats);
}

double tail_pairing(Atom lhs, Atom rhs, double u_start, double tol,
                    const PairingOptions& opts, PairingStats* stats) {
  require(lhs.kind != Atom::Kind::LogChi && rhs.kind != Atom::Kind::LogChi,
          ErrorKind::Domain, "tail_pairing: log generator not supported");
  return pairing_from(factor_of(lhs), factor_of(rhs), Kernel::InvSq, u_start, tol, opts,
                      stats);
}

// ---------------------------------------------------------------------------
// Residual functions

double default_cutoff(const DilationBasis& basis, std::size_t segment_budget) {
  double density = 0.0;
  for (double a : basis.dilations()) density += 1.0 / a;
  double U = density > 0.0 ? static_cast<double>(segment_budget) / density : 2.0;
  const double amax = basis.empty() ? 1.0 : basis.dilations().back();
  U = std::max(U, 4.0 * amax);
  return 1.0 / U;
}

PiecewiseFunction residual_function(const DilationBasis& basis,
                                    std::span<const double> coeffs, double x_cut) {
  require(coeffs.size() == basis.size(), ErrorKind::LengthMismatch,
          "residual_function: coefficient length does not match basis");
  require(x_cut > 0.0 && x_cut < 1.0, ErrorKind::Domain,
          "residual_function: x_cut must lie in (0,1)");
  const std::size_t n = basis.size();
  const double U = 1.0 / x_cut;

  // Merged breakpoints a_k m in (1, U), collected with their dilation index.
  struct Event {
    double u;
    std::size_t k;
  };
  std::vector<Event> events;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = basis[k];
    for (double m = std::floor(1.0 / a) + 1.0;; m += 1.0) {
      const double u = a * m;
      if (!(u < U)) break;
      if (u > 1.0) events.push_back({u, k});
    }
  }
  std::sort(events.begin(), events.end(),
            [](const Event& l, const Event& r) { return l.u < r.u || (l.u == r.u && l.k < r.k); });

  double beta = 0.0;
  {
    CompensatedSum b;
    for (std::size_t k = 0; k < n; ++k) b += -coeffs[k] / basis[k];
    beta = b.value();
  }

  // m_k = floor(u / a_k) on the current piece; p_k = a_k m_k the last breakpoint.
  std::vector<double> mk(n);
  for (std::size_t k = 0; k < n; ++k) mk[k] = std::floor(1.0 / basis[k]);

  auto value_at = [&](double u) {
    // 1 - sum c_k (u - a_k m_k) / a_k, each fractional part in [0, 1).
    CompensatedSum acc;
    acc += 1.0;
    for (std::size_t k = 0; k < n; ++k) acc += -coeffs[k] * ((u - basis[k] * mk[k]) / basis[k]);
    return acc.value();
  };
  auto alpha_now = [&] {
    CompensatedSum acc;
    acc += 1.0;
    for (std::size_t k = 0; k < n; ++k) acc += coeffs[k] * mk[k];
    return acc.value();
  };

  std::vector<Segment> segs;
  segs.reserve(events.size() + 1);
  double lo = 1.0;
  std::size_t i = 0;
  const double merge_tol = 1e-13;
  while (lo < U) {
    double next = U;
    if (i < events.size()) next = std::min(next, events[i].u);
    if (next > lo * (1.0 + merge_tol)) {
      Segment s;
      s.x_hi = 1.0 / lo;
      s.x_lo = 1.0 / next;
      s.beta = beta;
      s.alpha = alpha_now();
      s.f_hi = value_at(lo);
      segs.push_back(s);
    }
    // Consume every event at (or within rounding of) `next`.
    while (i < events.size() && events[i].u <= next * (1.0 + merge_tol)) {
      mk[events[i].k] += 1.0;
      ++i;
    }
    lo = next;
  }
  if (!segs.empty()) {
    segs.front().x_hi = 1.0;
    segs.back().x_lo = x_cut;
  }

  TailSpec tail;
  tail.kind = TailSpec::Kind::Residual;
  tail.dilations.assign(basis.dilations().begin(), basis.dilations().end());
  tail.coeffs.assign(coeffs.begin(), coeffs.end());
  double bound = 1.0;
  for (double c : coeffs) bound += std::abs(c);
  tail.bound = bound;
  if (n == 0) {
    tail.kind = TailSpec::Kind::Constant;
    tail.value = 1.0;
  }
  return PiecewiseFunction(std::move(segs), x_cut, std::move(tail));
}

}  // namespace nbx
