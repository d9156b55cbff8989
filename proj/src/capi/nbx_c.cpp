#include "nbx/nbx.h"

#include "nbx/dilation_basis.hpp"
#include "nbx/extrapolation.hpp"
#include "nbx/index_estimator.hpp"
#include "nbx/k_functional.hpp"
#include "nbx/minimizer.hpp"
#include "nbx/piecewise.hpp"
#include "nbx/rearrangement.hpp"

#include <cmath>
#include <fstream>
#include <new>
#include <string>
#include <vector>

struct nbx_basis {
  nbx::DilationBasis impl;
};
struct nbx_function {
  nbx::PiecewiseFunction impl;
};
struct nbx_profile {
  nbx::RearrangementProfile impl;
};
struct nbx_weight {
  nbx::TemperedWeight impl;
};
struct nbx_gram {
  nbx::GramData impl;
};
struct nbx_sweep {
  std::vector<nbx::DistanceReport> reports;
};

namespace {

thread_local std::string g_last_error;

nbx_status set_error(nbx_status s, const char* what) {
  g_last_error = what;
  return s;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
nbx_status guard(F&& body) {
  try {
    body();
    return NBX_OK;
  } catch (const nbx::Error& e) {
    return set_error(static_cast<nbx_status>(static_cast<int>(e.kind())), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(NBX_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(NBX_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(NBX_ERR_INTERNAL, "unknown error");
  }
}

#define NBX_REQUIRE_PTR(p) \
  if (!(p)) return set_error(NBX_ERR_NULL_ARGUMENT, "null argument: " #p)

void fill(nbx_distance* out, const nbx::DistanceReport& r) {
  out->n = r.n;
  out->l2_distance = r.l2_distance;
  out->d2_quadratic = r.d2_quadratic;
  out->d2_projection = r.d2_projection;
  out->d2_direct = r.d2_direct ? *r.d2_direct : std::nan("");
  out->normal_residual = r.normal_residual;
  out->cond_estimate = r.cond_estimate;
  out->regularized = r.regularized ? 1 : 0;
  out->reg_lambda = r.reg_lambda;
  out->reg_bias = r.reg_bias;
  out->constraint_residual = r.l2_coeffs.constraint_residual;
  out->has_delta = r.delta_distance ? 1 : 0;
  out->delta_distance = r.delta_distance ? *r.delta_distance : std::nan("");
  out->delta_at_l2 = r.delta_at_l2;
  out->delta_at_zero = r.delta_at_zero;
  out->delta_theta_star = r.delta_theta_star;
  out->delta_t_star = r.delta_t_star;
  out->iterations = r.iterations;
  out->budget_exhausted = r.budget_exhausted ? 1 : 0;
  out->failed = r.error.empty() ? 0 : 1;
}

void fill(nbx_delta_result* out, const nbx::DeltaNormResult& r) {
  out->value = r.value;
  out->theta_star = r.theta_star;
  out->t_star = r.t_star;
  out->refined_value = r.refined_value;
  out->certificate = r.certificate;
}

void fill(nbx_indices* out, const nbx::IndexEstimate& e) {
  out->alpha0 = e.alpha0;
  out->beta0 = e.beta0;
  out->alpha_chord = e.alpha_chord;
  out->beta_chord = e.beta_chord;
  out->gamma_cap = e.gamma_cap;
}

}  // namespace

extern "C" {

const char* nbx_version(void) { return "0.1.0"; }
const char* nbx_last_error(void) { return g_last_error.c_str(); }

const char* nbx_status_name(nbx_status s) {
  switch (s) {
    case NBX_OK: return "ok";
    case NBX_ERR_DOMAIN: return "domain";
    case NBX_ERR_LENGTH_MISMATCH: return "length_mismatch";
    case NBX_ERR_TOLERANCE_NOT_REACHED: return "tolerance_not_reached";
    case NBX_ERR_NON_CONVERGENCE: return "non_convergence";
    case NBX_ERR_DIVERGENCE: return "divergence";
    case NBX_ERR_INSTABILITY: return "instability";
    case NBX_ERR_ILL_CONDITIONED: return "ill_conditioned";
    case NBX_ERR_OPTIMIZATION_FAILURE: return "optimization_failure";
    case NBX_ERR_NOT_QUASI_CONCAVE: return "not_quasi_concave";
    case NBX_ERR_CONFIG: return "config";
    case NBX_ERR_IO: return "io";
    case NBX_ERR_NULL_ARGUMENT: return "null_argument";
    case NBX_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

// --- bases and pairings ----------------------------------------------------

nbx_status nbx_basis_integers(size_t n, nbx_basis** out) {
  NBX_REQUIRE_PTR(out);
  return guard([&] { *out = new nbx_basis{nbx::DilationBasis::integers(n)}; });
}

nbx_status nbx_basis_from(const double* dilations, size_t n, nbx_basis** out) {
  NBX_REQUIRE_PTR(out);
  if (n > 0) NBX_REQUIRE_PTR(dilations);
  return guard([&] {
    *out = new nbx_basis{nbx::DilationBasis::from(std::vector<double>(dilations, dilations + n))};
  });
}

void nbx_basis_free(nbx_basis* b) { delete b; }

nbx_status nbx_basis_size(const nbx_basis* b, size_t* out) {
  NBX_REQUIRE_PTR(b);
  NBX_REQUIRE_PTR(out);
  *out = b->impl.size();
  return NBX_OK;
}

nbx_status nbx_basis_dilation(const nbx_basis* b, size_t k, double* out) {
  NBX_REQUIRE_PTR(b);
  NBX_REQUIRE_PTR(out);
  if (k >= b->impl.size()) return set_error(NBX_ERR_DOMAIN, "basis index out of range");
  *out = b->impl[k];
  return NBX_OK;
}

nbx_status nbx_eval_rho(double a, double x, double* out) {
  NBX_REQUIRE_PTR(out);
  return guard([&] { *out = nbx::eval_rho(a, x); });
}

nbx_status nbx_inner_product(double a, double b, double tol, double* out) {
  NBX_REQUIRE_PTR(out);
  return guard([&] { *out = nbx::inner_product(a, b, tol); });
}

nbx_status nbx_inner_product_atoms(nbx_atom_kind ka, double a, nbx_atom_kind kb, double b,
                                   double tol, double* out) {
  NBX_REQUIRE_PTR(out);
  auto atom = [](nbx_atom_kind k, double d) {
    switch (k) {
      case NBX_ATOM_CHI: return nbx::Atom::chi();
      case NBX_ATOM_LOG_CHI: return nbx::Atom::log_chi();
      case NBX_ATOM_RHO: return nbx::Atom::rho(d);
    }
    nbx::fail(nbx::ErrorKind::Domain, "unknown atom kind");
  };
  return guard([&] { *out = nbx::inner_product(atom(ka, a), atom(kb, b), tol); });
}

nbx_status nbx_phi_constraint_residual(const nbx_basis* b, const double* coeffs, size_t n,
                                       double* out) {
  NBX_REQUIRE_PTR(b);
  NBX_REQUIRE_PTR(out);
  if (n > 0) NBX_REQUIRE_PTR(coeffs);
  return guard([&] {
    *out = nbx::phi_constraint_residual(b->impl, std::span<const double>(coeffs, n));
  });
}

nbx_status nbx_default_cutoff(const nbx_basis* b, double* out) {
  NBX_REQUIRE_PTR(b);
  NBX_REQUIRE_PTR(out);
  return guard([&] { *out = nbx::default_cutoff(b->impl); });
}

// --- functions ---------------------------------------------------------------

nbx_status nbx_function_residual(const nbx_basis* b, const double* coeffs, size_t n, double x_cut,
                                 nbx_function** out) {
  NBX_REQUIRE_PTR(b);
  NBX_REQUIRE_PTR(out);
  if (n > 0) NBX_REQUIRE_PTR(coeffs);
  return guard([&] {
    const double xc = x_cut > 0.0 ? x_cut : nbx::default_cutoff(b->impl);
    *out = new nbx_function{
        nbx::residual_function(b->impl, std::span<const double>(coeffs, n), xc)};
  });
}

nbx_status nbx_function_constant(double value, nbx_function** out) {
  NBX_REQUIRE_PTR(out);
  return guard([&] { *out = new nbx_function{nbx::PiecewiseFunction::constant(value)}; });
}

nbx_status nbx_function_step(double value, double width, nbx_function** out) {
  NBX_REQUIRE_PTR(out);
  return guard([&] {
    const double xc = std::min(1e-3, 0.5 * width);
    *out = new nbx_function{nbx::PiecewiseFunction::step(value, width, xc)};
  });
}

nbx_status nbx_function_from_terms(const double* x_lo, const double* x_hi, const double* alpha,
                                   const double* beta, size_t n, double x_cut, double tail_value,
                                   nbx_function** out) {
  NBX_REQUIRE_PTR(out);
  NBX_REQUIRE_PTR(x_lo);
  NBX_REQUIRE_PTR(x_hi);
  NBX_REQUIRE_PTR(alpha);
  NBX_REQUIRE_PTR(beta);
  return guard([&] {
    std::vector<nbx::Segment> segs(n);
    for (size_t i = 0; i < n; ++i) segs[i] = {x_lo[i], x_hi[i], alpha[i], beta[i], 0.0};
    *out = new nbx_function{nbx::PiecewiseFunction::from_terms(std::move(segs), x_cut, tail_value)};
  });
}

nbx_status nbx_function_scaled(const nbx_function* f, double c, nbx_function** out) {
  NBX_REQUIRE_PTR(f);
  NBX_REQUIRE_PTR(out);
  return guard([&] { *out = new nbx_function{f->impl.scaled(c)}; });
}

void nbx_function_free(nbx_function* f) { delete f; }

nbx_status nbx_function_eval(const nbx_function* f, double x, double* out) {
  NBX_REQUIRE_PTR(f);
  NBX_REQUIRE_PTR(out);
  return guard([&] { *out = f->impl(x); });
}

nbx_status nbx_function_segments(const nbx_function* f, size_t* out) {
  NBX_REQUIRE_PTR(f);
  NBX_REQUIRE_PTR(out);
  *out = f->impl.segments().size();
  return NBX_OK;
}

nbx_status nbx_function_l1(const nbx_function* f, double* out) {
  NBX_REQUIRE_PTR(f);
  NBX_REQUIRE_PTR(out);
  return guard([&] { *out = nbx::l1_norm(f->impl); });
}

nbx_status nbx_function_l2(const nbx_function* f, double* out) {
  NBX_REQUIRE_PTR(f);
  NBX_REQUIRE_PTR(out);
  return guard([&] { *out = std::sqrt(nbx::l2_norm_sq(f->impl)); });
}

nbx_status nbx_function_lp(const nbx_function* f, double p, double* out) {
  NBX_REQUIRE_PTR(f);
  NBX_REQUIRE_PTR(out);
  return guard([&] { *out = nbx::lp_norm(f->impl, p); });
}

nbx_status nbx_function_tail_bound(const nbx_function* f, double* out) {
  NBX_REQUIRE_PTR(f);
  NBX_REQUIRE_PTR(out);
  *out = f->impl.tail_l1_bound();
  return NBX_OK;
}

nbx_status nbx_j_l1_l2(const nbx_function* f, double t, double* out) {
  NBX_REQUIRE_PTR(f);
  NBX_REQUIRE_PTR(out);
  return guard([&] { *out = nbx::j_l1_l2(f->impl, t); });
}

// --- profiles ------------------------------------------------------------------

nbx_status nbx_rearrange(const nbx_function* f, size_t grid_size, nbx_profile** out) {
  NBX_REQUIRE_PTR(f);
  NBX_REQUIRE_PTR(out);
  return guard([&] { *out = new nbx_profile{nbx::rearrange(f->impl, grid_size)}; });
}

void nbx_profile_free(nbx_profile* p) { delete p; }

nbx_status nbx_profile_size(const nbx_profile* p, size_t* out) {
  NBX_REQUIRE_PTR(p);
  NBX_REQUIRE_PTR(out);
  *out = p->impl.size();
  return NBX_OK;
}

nbx_status nbx_profile_l1_mass(const nbx_profile* p, double* out) {
  NBX_REQUIRE_PTR(p);
  NBX_REQUIRE_PTR(out);
  *out = p->impl.l1_mass();
  return NBX_OK;
}

nbx_status nbx_profile_l2(const nbx_profile* p, double* out) {
  NBX_REQUIRE_PTR(p);
  NBX_REQUIRE_PTR(out);
  *out = std::sqrt(p->impl.l2_sq());
  return NBX_OK;
}

nbx_status nbx_profile_certificate(const nbx_profile* p, double* l1_change) {
  NBX_REQUIRE_PTR(p);
  NBX_REQUIRE_PTR(l1_change);
  *l1_change = p->impl.certificate().l1_change;
  return NBX_OK;
}

nbx_status nbx_double_star(const nbx_profile* p, double s, double* out) {
  NBX_REQUIRE_PTR(p);
  NBX_REQUIRE_PTR(out);
  return guard([&] { *out = p->impl.double_star(s); });
}

nbx_status nbx_k_l1_linf(const nbx_profile* p, double s, double* out) {
  NBX_REQUIRE_PTR(p);
  NBX_REQUIRE_PTR(out);
  return guard([&] { *out = p->impl.k_l1_linf(s); });
}

nbx_status nbx_k_l1_l2(const nbx_profile* p, double t, double* out) {
  NBX_REQUIRE_PTR(p);
  NBX_REQUIRE_PTR(out);
  return guard([&] { *out = nbx::k_l1_l2(p->impl, t); });
}

nbx_status nbx_k_l1_l2_exact(const nbx_profile* p, double t, double* out) {
  NBX_REQUIRE_PTR(p);
  NBX_REQUIRE_PTR(out);
  return guard([&] { *out = nbx::k_l1_l2_exact(p->impl, t); });
}

nbx_status nbx_k_l1_l2_exact_samples(const double* values, const double* masses, size_t n,
                                     double t, double* out) {
  NBX_REQUIRE_PTR(out);
  if (n > 0) {
    NBX_REQUIRE_PTR(values);
    NBX_REQUIRE_PTR(masses);
  }
  return guard([&] {
    *out = nbx::k_l1_l2_exact(std::span<const double>(values, n),
                              std::span<const double>(masses, n), t);
  });
}

nbx_status nbx_theta_q_norm(const nbx_profile* p, double theta, double q, int normalized,
                            nbx_variant variant, double* out) {
  NBX_REQUIRE_PTR(p);
  NBX_REQUIRE_PTR(out);
  return guard([&] {
    nbx::ThetaParams params{theta, q, normalized != 0};
    *out = nbx::theta_q_norm(p->impl, params,
                             variant == NBX_MODIFIED ? nbx::NormVariant::Modified
                                                     : nbx::NormVariant::Full);
  });
}

nbx_status nbx_profile_write_csv(const nbx_profile* p, const char* path) {
  NBX_REQUIRE_PTR(p);
  NBX_REQUIRE_PTR(path);
  return guard([&] {
    std::ofstream out(path);
    if (!out) nbx::fail(nbx::ErrorKind::Io, std::string("cannot open ") + path);
    p->impl.write_csv(out);
  });
}

// --- weights ---------------------------------------------------------------------

nbx_status nbx_weight_parse(const char* spec, nbx_weight** out) {
  NBX_REQUIRE_PTR(spec);
  NBX_REQUIRE_PTR(out);
  return guard([&] { *out = new nbx_weight{nbx::TemperedWeight::parse(spec)}; });
}

void nbx_weight_free(nbx_weight* w) { delete w; }

nbx_status nbx_weight_eval(const nbx_weight* w, double theta, double* out) {
  NBX_REQUIRE_PTR(w);
  NBX_REQUIRE_PTR(out);
  return guard([&] { *out = w->impl(theta); });
}

nbx_status nbx_weight_temper_constant(const nbx_weight* w, double* out) {
  NBX_REQUIRE_PTR(w);
  NBX_REQUIRE_PTR(out);
  *out = w->impl.certificate().c_t;
  return NBX_OK;
}

nbx_status nbx_omega(const nbx_weight* w, double p, double* out) {
  NBX_REQUIRE_PTR(w);
  NBX_REQUIRE_PTR(out);
  return guard([&] { *out = nbx::omega_from_weight(w->impl, p); });
}

nbx_status nbx_delta_norm(const nbx_profile* p, const nbx_weight* w, int theta_levels,
                          int t_levels, nbx_delta_result* out) {
  NBX_REQUIRE_PTR(p);
  NBX_REQUIRE_PTR(w);
  NBX_REQUIRE_PTR(out);
  return guard([&] {
    fill(out, nbx::delta_norm(p->impl, w->impl, nbx::DeltaGrid::standard(theta_levels, t_levels),
                              nbx::DeltaGrid::doubled(theta_levels, t_levels)));
  });
}

nbx_status nbx_delta_norm_theta_restricted(const nbx_profile* p, const nbx_weight* w,
                                           double theta0, nbx_delta_result* out) {
  NBX_REQUIRE_PTR(p);
  NBX_REQUIRE_PTR(w);
  NBX_REQUIRE_PTR(out);
  return guard([&] { fill(out, nbx::delta_norm_theta_restricted(p->impl, w->impl, theta0)); });
}

// --- Gram systems ------------------------------------------------------------------

nbx_status nbx_gram_integer(size_t n, double tol, const char* cache_dir, nbx_gram** out) {
  NBX_REQUIRE_PTR(out);
  return guard([&] {
    *out = new nbx_gram{nbx::cached_integer_gram(n, tol, cache_dir ? cache_dir : "")};
  });
}

nbx_status nbx_gram_assemble(const nbx_basis* b, double tol, int log_generator, nbx_gram** out) {
  NBX_REQUIRE_PTR(b);
  NBX_REQUIRE_PTR(out);
  return guard([&] {
    *out = new nbx_gram{nbx::assemble_gram(
        b->impl, tol, log_generator ? nbx::Generator::LogChi : nbx::Generator::Chi)};
  });
}

void nbx_gram_free(nbx_gram* g) { delete g; }

nbx_status nbx_gram_size(const nbx_gram* g, size_t* out) {
  NBX_REQUIRE_PTR(g);
  NBX_REQUIRE_PTR(out);
  *out = g->impl.size();
  return NBX_OK;
}

nbx_status nbx_gram_entry(const nbx_gram* g, size_t j, size_t k, double* out) {
  NBX_REQUIRE_PTR(g);
  NBX_REQUIRE_PTR(out);
  if (j >= g->impl.size() || k >= g->impl.size())
    return set_error(NBX_ERR_DOMAIN, "gram index out of range");
  *out = g->impl.gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
  return NBX_OK;
}

nbx_status nbx_gram_rhs(const nbx_gram* g, size_t k, double* out) {
  NBX_REQUIRE_PTR(g);
  NBX_REQUIRE_PTR(out);
  if (k >= g->impl.size()) return set_error(NBX_ERR_DOMAIN, "gram index out of range");
  *out = g->impl.rhs(static_cast<Eigen::Index>(k));
  return NBX_OK;
}

nbx_status nbx_gram_write_csv(const nbx_gram* g, const char* gram_path, const char* rhs_path) {
  NBX_REQUIRE_PTR(g);
  NBX_REQUIRE_PTR(gram_path);
  NBX_REQUIRE_PTR(rhs_path);
  return guard([&] {
    std::ofstream go(gram_path), bo(rhs_path);
    if (!go || !bo) nbx::fail(nbx::ErrorKind::Io, "cannot open Gram output files");
    nbx::write_gram_csv(g->impl, go);
    nbx::write_rhs_csv(g->impl, bo);
  });
}

nbx_status nbx_l2_distance(const nbx_gram* g, size_t n, int constrained, nbx_distance* out,
                           double* coeffs) {
  NBX_REQUIRE_PTR(g);
  NBX_REQUIRE_PTR(out);
  return guard([&] {
    const auto rep = nbx::l2_distance(g->impl.prefix(n), constrained != 0);
    fill(out, rep);
    if (coeffs) std::copy(rep.l2_coeffs.coeffs.begin(), rep.l2_coeffs.coeffs.end(), coeffs);
  });
}

nbx_status nbx_delta_distance(const nbx_gram* g, size_t n, const nbx_weight* w, size_t budget,
                              const double* start, nbx_distance* out, double* coeffs) {
  NBX_REQUIRE_PTR(g);
  NBX_REQUIRE_PTR(w);
  NBX_REQUIRE_PTR(out);
  return guard([&] {
    nbx::DeltaOptions opts;
    if (budget > 0) opts.budget = budget;
    std::vector<double> s;
    if (start) s.assign(start, start + n);
    const auto rep = nbx::delta_distance(g->impl.prefix(n), w->impl, opts, start ? &s : nullptr);
    fill(out, rep);
    if (coeffs) std::copy(rep.delta_coeffs.coeffs.begin(), rep.delta_coeffs.coeffs.end(), coeffs);
  });
}

void nbx_sweep_options_default(nbx_sweep_options* o) {
  if (!o) return;
  const nbx::SweepOptions d;
  o->constrained = d.constrained ? 1 : 0;
  o->with_delta = d.with_delta ? 1 : 0;
  o->cross_check = d.cross_check ? 1 : 0;
  o->delta_budget = d.delta.budget;
  o->grid_size = d.delta.grid_size;
  o->theta_levels = 20;
  o->t_levels = 40;
  o->tol = d.tol;
  o->cache_dir = nullptr;
}

nbx_status nbx_sweep_run(size_t n_max, const nbx_weight* w, const nbx_sweep_options* o,
                         nbx_sweep** out) {
  NBX_REQUIRE_PTR(w);
  NBX_REQUIRE_PTR(out);
  nbx_sweep_options local;
  nbx_sweep_options_default(&local);
  if (o) local = *o;
  return guard([&] {
    nbx::SweepOptions opts;
    opts.constrained = local.constrained != 0;
    opts.with_delta = local.with_delta != 0;
    opts.cross_check = local.cross_check != 0;
    opts.delta.budget = local.delta_budget;
    opts.delta.grid_size = local.grid_size;
    opts.delta.grid = nbx::DeltaGrid::standard(local.theta_levels, local.t_levels);
    opts.tol = local.tol;
    opts.cache_dir = local.cache_dir ? local.cache_dir : "";
    *out = new nbx_sweep{nbx::sweep(n_max, w->impl, opts)};
  });
}

void nbx_sweep_free(nbx_sweep* s) { delete s; }

nbx_status nbx_sweep_count(const nbx_sweep* s, size_t* out) {
  NBX_REQUIRE_PTR(s);
  NBX_REQUIRE_PTR(out);
  *out = s->reports.size();
  return NBX_OK;
}

nbx_status nbx_sweep_get(const nbx_sweep* s, size_t i, nbx_distance* out) {
  NBX_REQUIRE_PTR(s);
  NBX_REQUIRE_PTR(out);
  if (i >= s->reports.size()) return set_error(NBX_ERR_DOMAIN, "sweep index out of range");
  fill(out, s->reports[i]);
  return NBX_OK;
}

nbx_status nbx_sweep_coeffs(const nbx_sweep* s, size_t i, nbx_coeff_set which, double* buf,
                            size_t cap, size_t* len) {
  NBX_REQUIRE_PTR(s);
  NBX_REQUIRE_PTR(len);
  if (i >= s->reports.size()) return set_error(NBX_ERR_DOMAIN, "sweep index out of range");
  const auto& c = which == NBX_COEFFS_DELTA ? s->reports[i].delta_coeffs.coeffs
                                            : s->reports[i].l2_coeffs.coeffs;
  *len = c.size();
  if (buf) std::copy(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(std::min(cap, c.size())), buf);
  return NBX_OK;
}

nbx_status nbx_sweep_error(const nbx_sweep* s, size_t i, const char** msg) {
  NBX_REQUIRE_PTR(s);
  NBX_REQUIRE_PTR(msg);
  if (i >= s->reports.size()) return set_error(NBX_ERR_DOMAIN, "sweep index out of range");
  *msg = s->reports[i].error.c_str();
  return NBX_OK;
}

nbx_status nbx_sweep_write_csv(const nbx_sweep* s, const char* path) {
  NBX_REQUIRE_PTR(s);
  NBX_REQUIRE_PTR(path);
  return guard([&] {
    std::ofstream out(path);
    if (!out) nbx::fail(nbx::ErrorKind::Io, std::string("cannot open ") + path);
    nbx::write_sweep_csv(s->reports, out);
  });
}

// --- indices -----------------------------------------------------------------------

nbx_status nbx_estimate_indices(const double* grid, const double* values, size_t n,
                                double gamma_cap, nbx_indices* out) {
  NBX_REQUIRE_PTR(grid);
  NBX_REQUIRE_PTR(values);
  NBX_REQUIRE_PTR(out);
  return guard([&] {
    nbx::QuasiConcaveSample q(std::vector<double>(grid, grid + n),
                              std::vector<double>(values, values + n));
    fill(out, nbx::estimate_indices(q, gamma_cap));
  });
}

nbx_status nbx_estimate_indices_bruteforce(const double* grid, const double* values, size_t n,
                                           double gamma_cap, nbx_indices* out) {
  NBX_REQUIRE_PTR(grid);
  NBX_REQUIRE_PTR(values);
  NBX_REQUIRE_PTR(out);
  return guard([&] {
    nbx::QuasiConcaveSample q(std::vector<double>(grid, grid + n),
                              std::vector<double>(values, values + n));
    fill(out, nbx::estimate_indices_bruteforce(q, gamma_cap));
  });
}

nbx_status nbx_estimate_indices_profile_csv(const char* path, double gamma_cap,
                                            nbx_indices* out) {
  NBX_REQUIRE_PTR(path);
  NBX_REQUIRE_PTR(out);
  return guard([&] {
    std::ifstream in(path);
    if (!in) nbx::fail(nbx::ErrorKind::Io, std::string("cannot open ") + path);
    const auto q = nbx::QuasiConcaveSample::from_profile_csv(in);
    fill(out, nbx::estimate_indices(q, gamma_cap));
  });
}

}  // extern "C"
