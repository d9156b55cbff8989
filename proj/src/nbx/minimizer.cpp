#include "nbx/minimizer.hpp"

#include "nbx/numerics.hpp"
#include "nbx/piecewise.hpp"
#include "nbx/rearrangement.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace nbx {

GramData GramData::prefix(std::size_t n) const {
  require(n <= size(), ErrorKind::LengthMismatch, "gram prefix longer than basis");
  GramData g;
  g.basis = basis.prefix(n);
  g.generator = generator;
  g.tol = tol;
  g.gram = gram.topLeftCorner(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  g.rhs = rhs.head(static_cast<Eigen::Index>(n));
  g.generator_sq = generator_sq;
  return g;
}

GramData assemble_gram(const DilationBasis& basis, double tol, Generator gen) {
  GramData g;
  g.basis = basis;
  g.generator = gen;
  g.tol = tol;
  const auto n = static_cast<Eigen::Index>(basis.size());
  g.gram.resize(n, n);
  g.rhs.resize(n);
  const Atom lead = gen == Generator::Chi ? Atom::chi() : Atom::log_chi();
  // Both norms are known in closed form: |chi|^2 = 1, int_0^1 log^2 x = 2.
  g.generator_sq = gen == Generator::Chi ? 1.0 : 2.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double aj = basis[static_cast<std::size_t>(j)];
    g.rhs(j) = inner_product(lead, Atom::rho(aj), tol);
    for (Eigen::Index k = j; k < n; ++k) {
      const double v = inner_product(Atom::rho(aj), Atom::rho(basis[static_cast<std::size_t>(k)]), tol);
      g.gram(j, k) = v;
      g.gram(k, j) = v;
    }
  }
  return g;
}

namespace {

std::string tol_tag(double tol) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", tol);
  return buf;
}

bool read_cache(const std::filesystem::path& gram_path, const std::filesystem::path& rhs_path,
                std::size_t n, GramData& g) {
  std::ifstream gin(gram_path), bin(rhs_path);
  if (!gin || !bin) return false;
  std::string line;
  const auto N = static_cast<Eigen::Index>(n);
  g.gram = Eigen::MatrixXd::Constant(N, N, std::nan(""));
  g.rhs = Eigen::VectorXd::Constant(N, std::nan(""));
  std::getline(gin, line);
  while (std::getline(gin, line)) {
    long j = 0, k = 0;
    double v = 0.0;
    if (std::sscanf(line.c_str(), "%ld,%ld,%lf", &j, &k, &v) != 3) return false;
    if (j >= 1 && k >= 1 && j <= N && k <= N) g.gram(j - 1, k - 1) = v;
  }
  std::getline(bin, line);
  while (std::getline(bin, line)) {
    long k = 0;
    double v = 0.0;
    if (std::sscanf(line.c_str(), "%ld,%lf", &k, &v) != 2) return false;
    if (k >= 1 && k <= N) g.rhs(k - 1) = v;
  }
  return g.gram.allFinite() && g.rhs.allFinite();
}

}  // namespace

void write_gram_csv(const GramData& g, std::ostream& out) {
  out << "j,k,value\n";
  char buf[96];
  for (Eigen::Index j = 0; j < g.gram.rows(); ++j)
    for (Eigen::Index k = 0; k < g.gram.cols(); ++k) {
      std::snprintf(buf, sizeof buf, "%ld,%ld,%.17g\n", static_cast<long>(j + 1),
                    static_cast<long>(k + 1), g.gram(j, k));
      out << buf;
    }
}

void write_rhs_csv(const GramData& g, std::ostream& out) {
  out << "k,value\n";
  char buf[64];
  for (Eigen::Index k = 0; k < g.rhs.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%ld,%.17g\n", static_cast<long>(k + 1), g.rhs(k));
    out << buf;
  }
}

GramData cached_integer_gram(std::size_t n, double tol, const std::string& dir) {
  if (dir.empty()) return assemble_gram(DilationBasis::integers(n), tol);
  namespace fs = std::filesystem;
  const std::string tag = tol_tag(tol);
  // Smallest cached size >= n.
  std::size_t best = 0;
  std::error_code ec;
  if (fs::is_directory(dir, ec)) {
    const std::string pre = "gram_int_";
    const std::string post = "_" + tag + ".csv";
    for (const auto& e : fs::directory_iterator(dir, ec)) {
      const std::string name = e.path().filename().string();
      if (name.size() <= pre.size() + post.size() || name.rfind(pre, 0) != 0 ||
          name.substr(name.size() - post.size()) != post)
        continue;
      const std::string mid = name.substr(pre.size(), name.size() - pre.size() - post.size());
      if (mid.empty() || mid.find_first_not_of("0123456789") != std::string::npos) continue;
      const std::size_t m = std::stoul(mid);
      if (m >= n && (best == 0 || m < best)) best = m;
    }
  }
  if (best > 0) {
    GramData g;
    const std::string stem = std::to_string(best) + "_" + tag + ".csv";
    if (read_cache(fs::path(dir) / ("gram_int_" + stem), fs::path(dir) / ("b_int_" + stem), n, g)) {
      g.basis = DilationBasis::integers(n);
      g.tol = tol;
      g.generator = Generator::Chi;
      g.generator_sq = 1.0;
      return g;
    }
  }
  GramData g = assemble_gram(DilationBasis::integers(n), tol);
  fs::create_directories(dir, ec);
  const std::string stem = std::to_string(n) + "_" + tag + ".csv";
  auto write_atomic = [&](const fs::path& target, auto&& writer) {
    const fs::path tmp = target.string() + ".tmp";
    {
      std::ofstream out(tmp);
      if (!out) return;
      writer(out);
    }
    fs::rename(tmp, target, ec);
  };
  write_atomic(fs::path(dir) / ("gram_int_" + stem), [&](std::ostream& o) { write_gram_csv(g, o); });
  write_atomic(fs::path(dir) / ("b_int_" + stem), [&](std::ostream& o) { write_rhs_csv(g, o); });
  return g;
}

namespace {

Eigen::VectorXd constraint_vector(const DilationBasis& basis) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    r(static_cast<Eigen::Index>(k)) = constraint_weight(basis, k);
  }
  return r;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

DistanceReport l2_distance(const GramData& g, bool constrained) {
  DistanceReport rep;
  rep.n = g.size();
  rep.constrained = constrained;
  const double g0 = g.generator_sq;
  if (rep.n == 0) {
    rep.l2_distance = std::sqrt(g0);
    rep.d2_quadratic = rep.d2_projection = g0;
    rep.l2_coeffs = make_coefficients(g.basis, {});
    return rep;
  }
  const Eigen::MatrixXd& G = g.gram;
  const Eigen::VectorXd& b = g.rhs;
  const Eigen::Index n = G.rows();
  const Eigen::VectorXd r = constraint_vector(g.basis);
  const bool active = constrained && r.squaredNorm() > 0.0;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  rep.cond_estimate = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();

  auto solve = [&](const Eigen::MatrixXd& A, Eigen::VectorXd& c, double& mu) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return false;
    Eigen::VectorXd y = ldlt.solve(b);
    mu = 0.0;
    if (active) {
      const Eigen::VectorXd z = ldlt.solve(r);
      mu = r.dot(y) / r.dot(z);
      y -= mu * z;
    }
    c = y;
    return c.allFinite();
  };
  auto residual = [&](const Eigen::VectorXd& c, double mu) {
    return (G * c - b + mu * r).lpNorm<Eigen::Infinity>();
  };

  Eigen::VectorXd c;
  double mu = 0.0;
  bool ok = solve(G, c, mu);
  if (ok) rep.normal_residual = residual(c, mu);
  if (!ok || rep.normal_residual > 1e-8) {
    rep.regularized = true;
    rep.reg_lambda = 1e-12 * G.trace() / static_cast<double>(n);
    const Eigen::MatrixXd A = G + rep.reg_lambda * Eigen::MatrixXd::Identity(n, n);
    if (!solve(A, c, mu)) fail(ErrorKind::IllConditioned, "l2_distance: regularised solve failed");
    rep.normal_residual = residual(c, mu);
    rep.reg_bias = rep.reg_lambda * c.norm();
    if (rep.normal_residual > 1e-6)
      fail(ErrorKind::IllConditioned, "l2_distance: normal-equation residual above 1e-6");
  }
  rep.d2_quadratic = g0 - 2.0 * b.dot(c) + c.dot(G * c);
  rep.d2_projection = g0 - b.dot(c);
  rep.l2_distance = std::sqrt(std::max(0.0, rep.d2_quadratic));
  rep.l2_coeffs = make_coefficients(g.basis, to_std(c));
  return rep;
}

double direct_distance_sq(const DilationBasis& basis, std::span<const double> coeffs,
                          double x_cut) {
  require(coeffs.size() == basis.size(), ErrorKind::LengthMismatch,
          "direct_distance_sq: coefficient length does not match basis");
  if (x_cut <= 0.0) x_cut = default_cutoff(basis);
  const PiecewiseFunction f = residual_function(basis, coeffs, x_cut);
  const double U = 1.0 / x_cut;
  double l1c = 1.0;
  for (double c : coeffs) l1c += std::abs(c);
  const double tol = std::max(1e-9 / (l1c * l1c), 1e-17);
  CompensatedSum acc;
  acc += head_lp_integral(f, 2.0);
  acc += 1.0 / U;
  const std::size_t n = basis.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (coeffs[j] == 0.0) continue;
    acc += -2.0 * coeffs[j] * tail_pairing(Atom::chi(), Atom::rho(basis[j]), U, tol);
    acc += coeffs[j] * coeffs[j] * tail_pairing(Atom::rho(basis[j]), Atom::rho(basis[j]), U, tol);
    for (std::size_t k = j + 1; k < n; ++k) {
      if (coeffs[k] == 0.0) continue;
      acc += 2.0 * coeffs[j] * coeffs[k] *
             tail_pairing(Atom::rho(basis[j]), Atom::rho(basis[k]), U, tol);
    }
  }
  return acc.value();
}

namespace {

struct Evaluation {
  DeltaNormResult res;
  RearrangementProfile prof;
};

Evaluation evaluate(const DilationBasis& basis, std::span<const double> coeffs,
                    const TemperedWeight& w, const DeltaOptions& opts, double x_cut,
                    bool sources) {
  const PiecewiseFunction f = residual_function(basis, coeffs, x_cut);
  RearrangeOptions ro;
  ro.certify = false;
  ro.keep_sources = sources;
  Evaluation e{{}, rearrange(f, opts.grid_size, ro)};
  e.res = delta_norm_on(e.prof, w, opts.grid);
  return e;
}

// Derivative of M t^{1-theta} (int_{t^2}^inf f**^2)^{1/2} at the active grid
// point with respect to the coefficients.
Eigen::VectorXd subgradient(const DilationBasis& basis, const Evaluation& e,
                            const TemperedWeight& w) {
  const std::size_t n = basis.size();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  const auto& p = e.prof;
  const double t = e.res.t_star;
  const double tau = t * t;
  const double Q = p.tail_sq_integral(tau);
  if (!(Q > 0.0)) return g;
  const double coef = w(e.res.theta_star) * std::pow(t, 1.0 - e.res.theta_star) / std::sqrt(Q);
  const double omega_flat = p.tail_star_over_s(std::max(tau, 1e-300));
  std::vector<double> weight(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double lo = p.step_lo(i), hi = p.step_hi(i);
    const double mid = 0.5 * (lo + hi);
    const double omega = mid <= tau ? omega_flat : p.tail_star_over_s(mid);
    weight[i] = (hi - lo) * p.sources()[i].sign * omega;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double a = basis[k];
    CompensatedSum acc;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double y = p.sources()[i].u / a;
      acc += weight[i] * (y - std::floor(y));
    }
    g(static_cast<Eigen::Index>(k)) = -coef * acc.value();
  }
  return g;
}

}  // namespace

DeltaNormResult delta_objective(const DilationBasis& basis, std::span<const double> coeffs,
                                const TemperedWeight& w, const DeltaOptions& opts) {
  return evaluate(basis, coeffs, w, opts, default_cutoff(basis, opts.segment_budget), false).res;
}

DistanceReport delta_distance(const GramData& gd, const TemperedWeight& w,
                              const DeltaOptions& opts, const std::vector<double>* start) {
  const DilationBasis& basis = gd.basis;
  const std::size_t n = basis.size();
  DistanceReport rep;
  rep.n = n;
  rep.weight = w.id();
  const double x_cut = default_cutoff(basis, opts.segment_budget);
  const Eigen::VectorXd r = constraint_vector(basis);
  const double rr = r.squaredNorm();
  auto project = [&](Eigen::VectorXd& v) {
    if (rr > 0.0) v -= (r.dot(v) / rr) * r;
  };
  auto run = [&](const Eigen::VectorXd& c, bool sources) {
    return evaluate(basis, std::span<const double>(c.data(), static_cast<std::size_t>(c.size())),
                    w, opts, x_cut, sources);
  };

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd c0 = zero;
  if (start) {
    require(start->size() == n, ErrorKind::LengthMismatch, "delta_distance: start length");
    c0 = Eigen::Map<const Eigen::VectorXd>(start->data(), static_cast<Eigen::Index>(n));
  }
  project(c0);

  const Evaluation at_zero = run(zero, false);
  rep.delta_at_zero = at_zero.res.value;
  Evaluation cur = run(c0, true);
  rep.delta_at_l2 = cur.res.value;

  Eigen::VectorXd best_c = c0;
  double best = cur.res.value;
  DeltaNormResult best_res = cur.res;
  if (at_zero.res.value < best) {
    best = at_zero.res.value;
    best_c = zero;
    best_res = at_zero.res;
  }

  Eigen::VectorXd c = c0;
  double eps = 0.05;
  std::size_t stall = 0, it = 0;
  bool converged = n == 0;
  for (; it < opts.budget && !converged; ++it) {
    Eigen::VectorXd g = subgradient(basis, cur, w);
    project(g);
    const double gg = g.squaredNorm();
    if (!(gg > 0.0)) {
      converged = true;
      break;
    }
    const double target = best * (1.0 - eps);
    const double step = (cur.res.value - target) / gg;
    c -= step * g;
    project(c);
    cur = run(c, true);
    if (cur.res.value < best) {
      best = cur.res.value;
      best_c = c;
      best_res = cur.res;
      stall = 0;
    } else if (++stall >= 4) {
      eps *= 0.5;
      stall = 0;
      c = best_c;
      cur = run(c, true);
      if (eps < 1e-5) converged = true;
    }
  }
  rep.iterations = it;
  rep.budget_exhausted = !converged;
  rep.delta_distance = best;
  rep.delta_coeffs = make_coefficients(basis, to_std(best_c));
  rep.delta_theta_star = best_res.theta_star;
  rep.delta_t_star = best_res.t_star;
  return rep;
}

std::vector<DistanceReport> sweep(std::size_t n_max, const TemperedWeight& w,
                                  const SweepOptions& opts) {
  require(n_max >= 1 && n_max <= 512, ErrorKind::Config, "sweep: n_max must lie in [1, 512]");
  std::vector<std::size_t> ns;
  for (std::size_t n = 1; n <= n_max; n *= 2) ns.push_back(n);
  if (ns.back() != n_max) ns.push_back(n_max);

  const GramData full = cached_integer_gram(n_max, opts.tol, opts.cache_dir);
  std::vector<DistanceReport> out;
  for (std::size_t n : ns) {
    DistanceReport rep;
    rep.n = n;
    rep.weight = w.id();
    try {
      const GramData g = full.prefix(n);
      rep = l2_distance(g, opts.constrained);
      rep.weight = w.id();
      if (opts.cross_check) rep.d2_direct = direct_distance_sq(g.basis, rep.l2_coeffs.coeffs);
      if (opts.with_delta) {
        const DistanceReport d = delta_distance(g, w, opts.delta, &rep.l2_coeffs.coeffs);
        rep.delta_distance = d.delta_distance;
        rep.delta_coeffs = d.delta_coeffs;
        rep.delta_at_l2 = d.delta_at_l2;
        rep.delta_at_zero = d.delta_at_zero;
        rep.delta_theta_star = d.delta_theta_star;
        rep.delta_t_star = d.delta_t_star;
        rep.iterations = d.iterations;
        rep.budget_exhausted = d.budget_exhausted;
      }
    } catch (const Error& e) {
      rep.error = e.what();
    }
    out.push_back(std::move(rep));
  }
  return out;
}

void write_sweep_csv(const std::vector<DistanceReport>& reports, std::ostream& out) {
  out << "n,l2_distance,delta_distance,weight,cond_estimate\n";
  char buf[256];
  for (const auto& r : reports) {
    if (!r.error.empty()) {
      std::snprintf(buf, sizeof buf, "%zu,nan,nan,%s,nan\n", r.n, r.weight.c_str());
    } else {
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%s,%.6g\n", r.n, r.l2_distance,
                    r.delta_distance ? *r.delta_distance : std::nan(""), r.weight.c_str(),
                    r.cond_estimate);
    }
    out << buf;
  }
}

}  // namespace nbx
