/* C interface to the nbx library.
 *
 * Every function returns an nbx_status. On failure the message is available
 * from nbx_last_error() until the next failing call on the same thread.
 * Objects are opaque handles released with the matching *_free function;
 * passing NULL to a free function is a no-op.
 */
#ifndef NBX_NBX_H
#define NBX_NBX_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(NBX_BUILDING_SHARED)
#    define NBX_API __declspec(dllexport)
#  else
#    define NBX_API __declspec(dllimport)
#  endif
#else
#  define NBX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nbx_status {
  NBX_OK = 0,
  NBX_ERR_DOMAIN = 1,
  NBX_ERR_LENGTH_MISMATCH = 2,
  NBX_ERR_TOLERANCE_NOT_REACHED = 3,
  NBX_ERR_NON_CONVERGENCE = 4,
  NBX_ERR_DIVERGENCE = 5,
  NBX_ERR_INSTABILITY = 6,
  NBX_ERR_ILL_CONDITIONED = 7,
  NBX_ERR_OPTIMIZATION_FAILURE = 8,
  NBX_ERR_NOT_QUASI_CONCAVE = 9,
  NBX_ERR_CONFIG = 10,
  NBX_ERR_IO = 11,
  NBX_ERR_NULL_ARGUMENT = 20,
  NBX_ERR_INTERNAL = 99
} nbx_status;

typedef struct nbx_basis nbx_basis;
typedef struct nbx_function nbx_function;
typedef struct nbx_profile nbx_profile;
typedef struct nbx_weight nbx_weight;
typedef struct nbx_gram nbx_gram;
typedef struct nbx_sweep nbx_sweep;

typedef enum nbx_atom_kind { NBX_ATOM_CHI = 0, NBX_ATOM_LOG_CHI = 1, NBX_ATOM_RHO = 2 } nbx_atom_kind;
typedef enum nbx_variant { NBX_FULL = 0, NBX_MODIFIED = 1 } nbx_variant;
typedef enum nbx_coeff_set { NBX_COEFFS_L2 = 0, NBX_COEFFS_DELTA = 1 } nbx_coeff_set;

typedef struct nbx_delta_result {
  double value;
  double theta_star;
  double t_star;
  double refined_value;
  double certificate;
} nbx_delta_result;

typedef struct nbx_distance {
  size_t n;
  double l2_distance;
  double d2_quadratic;
  double d2_projection;
  double d2_direct; /* NaN when not computed */
  double normal_residual;
  double cond_estimate;
  int regularized;
  double reg_lambda;
  double reg_bias;
  double constraint_residual;
  int has_delta;
  double delta_distance;
  double delta_at_l2;
  double delta_at_zero;
  double delta_theta_star;
  double delta_t_star;
  size_t iterations;
  int budget_exhausted;
  int failed; /* sweep only: the solve for this n raised an error */
} nbx_distance;

typedef struct nbx_sweep_options {
  int constrained;
  int with_delta;
  int cross_check;
  size_t delta_budget;
  size_t grid_size;
  int theta_levels;
  int t_levels;
  double tol;
  const char* cache_dir; /* NULL or "" disables the Gram cache */
} nbx_sweep_options;

typedef struct nbx_indices {
  double alpha0;
  double beta0;
  double alpha_chord;
  double beta_chord;
  double gamma_cap;
} nbx_indices;

NBX_API const char* nbx_version(void);
NBX_API const char* nbx_last_error(void);
NBX_API const char* nbx_status_name(nbx_status s);

/* Dilation bases and pairings */
NBX_API nbx_status nbx_basis_integers(size_t n, nbx_basis** out);
NBX_API nbx_status nbx_basis_from(const double* dilations, size_t n, nbx_basis** out);
NBX_API void nbx_basis_free(nbx_basis* b);
NBX_API nbx_status nbx_basis_size(const nbx_basis* b, size_t* out);
NBX_API nbx_status nbx_basis_dilation(const nbx_basis* b, size_t k, double* out);

NBX_API nbx_status nbx_eval_rho(double a, double x, double* out);
NBX_API nbx_status nbx_inner_product(double a, double b, double tol, double* out);
/* `a`/`b` are ignored for the chi and log atoms. */
NBX_API nbx_status nbx_inner_product_atoms(nbx_atom_kind ka, double a, nbx_atom_kind kb, double b,
                                           double tol, double* out);
NBX_API nbx_status nbx_phi_constraint_residual(const nbx_basis* b, const double* coeffs, size_t n,
                                               double* out);
NBX_API nbx_status nbx_default_cutoff(const nbx_basis* b, double* out);

/* Piecewise functions on (0,1) */
NBX_API nbx_status nbx_function_residual(const nbx_basis* b, const double* coeffs, size_t n,
                                         double x_cut, nbx_function** out);
NBX_API nbx_status nbx_function_constant(double value, nbx_function** out);
NBX_API nbx_status nbx_function_step(double value, double width, nbx_function** out);
/* Segments in descending x; x_hi of the first must be 1, x_lo of the last x_cut. */
NBX_API nbx_status nbx_function_from_terms(const double* x_lo, const double* x_hi,
                                           const double* alpha, const double* beta, size_t n,
                                           double x_cut, double tail_value, nbx_function** out);
NBX_API nbx_status nbx_function_scaled(const nbx_function* f, double c, nbx_function** out);
NBX_API void nbx_function_free(nbx_function* f);
NBX_API nbx_status nbx_function_eval(const nbx_function* f, double x, double* out);
NBX_API nbx_status nbx_function_segments(const nbx_function* f, size_t* out);
NBX_API nbx_status nbx_function_l1(const nbx_function* f, double* out);
NBX_API nbx_status nbx_function_l2(const nbx_function* f, double* out);
NBX_API nbx_status nbx_function_lp(const nbx_function* f, double p, double* out);
NBX_API nbx_status nbx_function_tail_bound(const nbx_function* f, double* out);
NBX_API nbx_status nbx_j_l1_l2(const nbx_function* f, double t, double* out);

/* Rearrangements and K-functionals */
NBX_API nbx_status nbx_rearrange(const nbx_function* f, size_t grid_size, nbx_profile** out);
NBX_API void nbx_profile_free(nbx_profile* p);
NBX_API nbx_status nbx_profile_size(const nbx_profile* p, size_t* out);
NBX_API nbx_status nbx_profile_l1_mass(const nbx_profile* p, double* out);
NBX_API nbx_status nbx_profile_l2(const nbx_profile* p, double* out);
NBX_API nbx_status nbx_profile_certificate(const nbx_profile* p, double* l1_change);
NBX_API nbx_status nbx_double_star(const nbx_profile* p, double s, double* out);
NBX_API nbx_status nbx_k_l1_linf(const nbx_profile* p, double s, double* out);
NBX_API nbx_status nbx_k_l1_l2(const nbx_profile* p, double t, double* out);
NBX_API nbx_status nbx_k_l1_l2_exact(const nbx_profile* p, double t, double* out);
NBX_API nbx_status nbx_k_l1_l2_exact_samples(const double* values, const double* masses, size_t n,
                                             double t, double* out);
/* q may be INFINITY. */
NBX_API nbx_status nbx_theta_q_norm(const nbx_profile* p, double theta, double q, int normalized,
                                    nbx_variant variant, double* out);
NBX_API nbx_status nbx_profile_write_csv(const nbx_profile* p, const char* path);

/* Weights and extrapolation norms */
NBX_API nbx_status nbx_weight_parse(const char* spec, nbx_weight** out);
NBX_API void nbx_weight_free(nbx_weight* w);
NBX_API nbx_status nbx_weight_eval(const nbx_weight* w, double theta, double* out);
NBX_API nbx_status nbx_weight_temper_constant(const nbx_weight* w, double* out);
NBX_API nbx_status nbx_omega(const nbx_weight* w, double p, double* out);
/* Grids theta = 1 - 2^{-j}, j = 1..theta_levels and t = 2^{-i/2}, i = 0..t_levels,
 * certified against the doubled grids. */
NBX_API nbx_status nbx_delta_norm(const nbx_profile* p, const nbx_weight* w, int theta_levels,
                                  int t_levels, nbx_delta_result* out);
NBX_API nbx_status nbx_delta_norm_theta_restricted(const nbx_profile* p, const nbx_weight* w,
                                                   double theta0, nbx_delta_result* out);

/* Gram systems and distances */
NBX_API nbx_status nbx_gram_integer(size_t n, double tol, const char* cache_dir, nbx_gram** out);
NBX_API nbx_status nbx_gram_assemble(const nbx_basis* b, double tol, int log_generator,
                                     nbx_gram** out);
NBX_API void nbx_gram_free(nbx_gram* g);
NBX_API nbx_status nbx_gram_size(const nbx_gram* g, size_t* out);
NBX_API nbx_status nbx_gram_entry(const nbx_gram* g, size_t j, size_t k, double* out);
NBX_API nbx_status nbx_gram_rhs(const nbx_gram* g, size_t k, double* out);
NBX_API nbx_status nbx_gram_write_csv(const nbx_gram* g, const char* gram_path, const char* rhs_path);
/* Uses the leading n x n block. coeffs may be NULL; otherwise it receives n values. */
NBX_API nbx_status nbx_l2_distance(const nbx_gram* g, size_t n, int constrained, nbx_distance* out,
                                   double* coeffs);
NBX_API nbx_status nbx_delta_distance(const nbx_gram* g, size_t n, const nbx_weight* w,
                                      size_t budget, const double* start, nbx_distance* out,
                                      double* coeffs);

NBX_API void nbx_sweep_options_default(nbx_sweep_options* o);
NBX_API nbx_status nbx_sweep_run(size_t n_max, const nbx_weight* w, const nbx_sweep_options* o,
                                 nbx_sweep** out);
NBX_API void nbx_sweep_free(nbx_sweep* s);
NBX_API nbx_status nbx_sweep_count(const nbx_sweep* s, size_t* out);
NBX_API nbx_status nbx_sweep_get(const nbx_sweep* s, size_t i, nbx_distance* out);
/* Copies up to `cap` coefficients; *len receives the full count. */
NBX_API nbx_status nbx_sweep_coeffs(const nbx_sweep* s, size_t i, nbx_coeff_set which, double* buf,
                                    size_t cap, size_t* len);
NBX_API nbx_status nbx_sweep_error(const nbx_sweep* s, size_t i, const char** msg);
NBX_API nbx_status nbx_sweep_write_csv(const nbx_sweep* s, const char* path);

/* Dilation indices */
NBX_API nbx_status nbx_estimate_indices(const double* grid, const double* values, size_t n,
                                        double gamma_cap, nbx_indices* out);
NBX_API nbx_status nbx_estimate_indices_bruteforce(const double* grid, const double* values,
                                                   size_t n, double gamma_cap, nbx_indices* out);
NBX_API nbx_status nbx_estimate_indices_profile_csv(const char* path, double gamma_cap,
                                                    nbx_indices* out);

#ifdef __cplusplus
}
#endif

#endif
