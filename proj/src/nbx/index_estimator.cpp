#include "nbx/index_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>
#include <string>

namespace nbx {

QuasiConcaveSample::QuasiConcaveSample(std::vector<double> grid, std::vector<double> values,
                                       double tol)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require(grid_.size() == values_.size(), ErrorKind::LengthMismatch,
          "quasi-concave sample: grid and values differ in length");
  require(!grid_.empty(), ErrorKind::NotQuasiConcave, "quasi-concave sample: empty");
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const double s = grid_[i], v = values_[i];
    require(s > 0.0 && s <= 1.0, ErrorKind::NotQuasiConcave, "quasi-concave sample: s outside (0,1]");
    require(v > 0.0 && std::isfinite(v), ErrorKind::NotQuasiConcave,
            "quasi-concave sample: values must be positive");
    if (i == 0) continue;
    const double sp = grid_[i - 1], vp = values_[i - 1];
    require(s > sp, ErrorKind::NotQuasiConcave, "quasi-concave sample: grid not increasing");
    require(v >= vp * (1.0 - tol), ErrorKind::NotQuasiConcave,
            "quasi-concave sample: phi decreases");
    require(v / s <= (vp / sp) * (1.0 + tol), ErrorKind::NotQuasiConcave,
            "quasi-concave sample: phi(s)/s increases");
  }
}

QuasiConcaveSample QuasiConcaveSample::from_profile_csv(std::istream& in, double tol) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::Io, "profile csv: empty input");
  require(line.rfind("s,fstar,fstarstar", 0) == 0, ErrorKind::Config,
          "profile csv: expected header s,fstar,fstarstar");
  std::vector<double> s, phi;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b, c;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c))
      fail(ErrorKind::Config, "profile csv: malformed row");
    const double sv = std::stod(a), ss = std::stod(c);
    // Steps of zero height at the right end carry no information.
    if (ss <= 0.0) continue;
    s.push_back(sv);
    phi.push_back(sv * ss);
  }
  return QuasiConcaveSample(std::move(s), std::move(phi), tol);
}

namespace {

std::vector<double> logs(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return std::log(x); });
  return out;
}

template <class Cmp>
double extreme_pair_gap(const std::vector<double>& x, const std::vector<double>& l, double theta,
                        Cmp better) {
  // max (or min) over i < j of h_i - h_j with h = l - theta x.
  double run = l[0] - theta * x[0];
  double best = better(1.0, 0.0) ? -std::numeric_limits<double>::infinity()
                                  : std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < x.size(); ++j) {
    const double h = l[j] - theta * x[j];
    const double gap = run - h;
    if (better(gap, best)) best = gap;
    if (better(h, run)) run = h;
  }
  return best;
}

IndexEstimate chord_slopes(IndexEstimate est, const std::vector<double>& x,
                           const std::vector<double>& l) {
  const double range = x.back() - x.front();
  const double sep = 0.5 * range;
  double smin = std::numeric_limits<double>::infinity();
  double smax = -std::numeric_limits<double>::infinity();
  std::size_t j0 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    j0 = std::max(j0, i + 1);
    while (j0 < x.size() && x[j0] - x[i] < sep) ++j0;
    for (std::size_t j = j0; j < x.size(); ++j) {
      const double slope = (l[j] - l[i]) / (x[j] - x[i]);
      smin = std::min(smin, slope);
      smax = std::max(smax, slope);
    }
  }
  est.alpha_chord = std::clamp(smin, 0.0, 1.0);
  est.beta_chord = std::clamp(smax, 0.0, 1.0);
  return est;
}

}  // namespace

double log_gamma_upper(const QuasiConcaveSample& q, double theta) {
  if (q.size() < 2) return 0.0;
  return std::max(0.0, extreme_pair_gap(logs(q.grid()), logs(q.values()), theta,
                                        [](double a, double b) { return a > b; }));
}

double log_gamma_lower(const QuasiConcaveSample& q, double theta) {
  if (q.size() < 2) return 0.0;
  return std::max(0.0, -extreme_pair_gap(logs(q.grid()), logs(q.values()), theta,
                                         [](double a, double b) { return a < b; }));
}

double almost_increasing_constant(const QuasiConcaveSample& q, double theta) {
  return std::exp(log_gamma_upper(q, theta));
}

IndexEstimate estimate_indices(const QuasiConcaveSample& q, double gamma_cap) {
  require(q.size() >= 64, ErrorKind::Domain, "estimate_indices: need at least 64 grid points");
  require(gamma_cap >= 1.0, ErrorKind::Domain, "estimate_indices: gamma_cap must be >= 1");
  const double cap = std::log(gamma_cap);
  const auto x = logs(q.grid());
  const auto l = logs(q.values());
  auto upper = [&](double th) {
    return extreme_pair_gap(x, l, th, [](double a, double b) { return a > b; });
  };
  auto lower = [&](double th) {
    return -extreme_pair_gap(x, l, th, [](double a, double b) { return a < b; });
  };
  IndexEstimate est;
  est.gamma_cap = gamma_cap;

  // The required gamma grows with theta for the upper bound and shrinks for
  // the lower one.
  double lo = 0.0, hi = 1.0;
  if (upper(1.0) <= cap) {
    est.alpha0 = 1.0;
  } else {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (upper(mid) <= cap ? lo : hi) = mid;
    }
    est.alpha0 = lo;
  }
  lo = 0.0;
  hi = 1.0;
  if (lower(0.0) <= cap) {
    est.beta0 = 0.0;
  } else {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (lower(mid) <= cap ? hi : lo) = mid;
    }
    est.beta0 = hi;
  }
  est.beta0 = std::max(est.beta0, est.alpha0);

  // Chord slopes over well separated pairs, on at most 2048 points.
  if (x.size() > 2048) {
    std::vector<double> tx, tl;
    for (std::size_t k = 0; k < 2048; ++k) {
      const std::size_t i = (k * (x.size() - 1)) / 2047;
      tx.push_back(x[i]);
      tl.push_back(l[i]);
    }
    return chord_slopes(est, tx, tl);
  }
  return chord_slopes(est, x, l);
}

IndexEstimate estimate_indices_bruteforce(const QuasiConcaveSample& q, double gamma_cap,
                                          std::size_t points) {
  require(gamma_cap >= 1.0, ErrorKind::Domain, "estimate_indices: gamma_cap must be >= 1");
  require(points >= 2, ErrorKind::Domain, "estimate_indices: need at least two points");
  const double cap = std::log(gamma_cap);
  std::vector<double> x, l;
  const std::size_t n = q.size();
  const std::size_t m = std::min(points, n);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = m == 1 ? 0 : (k * (n - 1)) / (m - 1);
    x.push_back(std::log(q.grid()[i]));
    l.push_back(std::log(q.values()[i]));
  }
  // Each pair bounds theta by slope +- log(gamma)/dx.
  double a = 1.0, b = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[j] - x[i];
      const double slope = (l[j] - l[i]) / dx;
      a = std::min(a, slope + cap / dx);
      b = std::max(b, slope - cap / dx);
    }
  IndexEstimate est;
  est.gamma_cap = gamma_cap;
  est.alpha0 = std::clamp(a, 0.0, 1.0);
  est.beta0 = std::clamp(b, est.alpha0, 1.0);
  est.alpha_chord = est.alpha0;
  est.beta_chord = est.beta0;
  return est;
}

}  // namespace nbx
