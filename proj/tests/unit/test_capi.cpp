#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nbx/nbx.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

TEST_CASE("status names and errors") {
  CHECK(std::string(nbx_status_name(NBX_OK)) == "ok");
  CHECK(std::strlen(nbx_version()) > 0);
  double v = 0.0;
  CHECK(nbx_eval_rho(0.5, 0.5, &v) == NBX_ERR_DOMAIN);
  CHECK(std::strlen(nbx_last_error()) > 0);
  CHECK(nbx_eval_rho(1.0, 0.5, nullptr) == NBX_ERR_NULL_ARGUMENT);
  CHECK(nbx_eval_rho(1.0, 0.4, &v) == NBX_OK);
  CHECK(v == doctest::Approx(0.5));
  nbx_basis_free(nullptr);
  nbx_function_free(nullptr);
  nbx_profile_free(nullptr);
}

TEST_CASE("basis and pairings") {
  nbx_basis* b = nullptr;
  REQUIRE(nbx_basis_integers(3, &b) == NBX_OK);
  size_t n = 0;
  CHECK(nbx_basis_size(b, &n) == NBX_OK);
  CHECK(n == 3);
  double a = 0.0;
  CHECK(nbx_basis_dilation(b, 2, &a) == NBX_OK);
  CHECK(a == 3.0);
  CHECK(nbx_basis_dilation(b, 3, &a) == NBX_ERR_DOMAIN);
  const double c[] = {5.0, -2.0, 7.0};
  double r = 1.0;
  CHECK(nbx_phi_constraint_residual(b, c, 3, &r) == NBX_OK);
  CHECK(r == 0.0);
  CHECK(nbx_phi_constraint_residual(b, c, 2, &r) == NBX_ERR_LENGTH_MISMATCH);
  double xc = 0.0;
  CHECK(nbx_default_cutoff(b, &xc) == NBX_OK);
  CHECK(xc > 0.0);
  nbx_basis_free(b);

  const double bad[] = {2.0, 1.0};
  CHECK(nbx_basis_from(bad, 2, &b) == NBX_ERR_DOMAIN);

  double v = 0.0;
  CHECK(nbx_inner_product(1.0, 1.0, 1e-12, &v) == NBX_OK);
  CHECK(v == doctest::Approx(0.260661401507813).epsilon(1e-13));
  CHECK(nbx_inner_product_atoms(NBX_ATOM_CHI, 0.0, NBX_ATOM_RHO, 1.0, 1e-12, &v) == NBX_OK);
  CHECK(v == doctest::Approx(0.422784335098467).epsilon(1e-13));
  CHECK(nbx_inner_product_atoms(NBX_ATOM_LOG_CHI, 0.0, NBX_ATOM_LOG_CHI, 0.0, 1e-12, &v) == NBX_OK);
  CHECK(v == doctest::Approx(2.0));
}

TEST_CASE("functions, profiles and norms") {
  nbx_function* f = nullptr;
  REQUIRE(nbx_function_constant(1.0, &f) == NBX_OK);
  double v = 0.0;
  CHECK(nbx_function_l1(f, &v) == NBX_OK);
  CHECK(v == doctest::Approx(1.0));
  CHECK(nbx_j_l1_l2(f, 3.0, &v) == NBX_OK);
  CHECK(v == doctest::Approx(3.0));

  nbx_profile* p = nullptr;
  CHECK(nbx_rearrange(f, 8, &p) == NBX_ERR_DOMAIN);
  REQUIRE(nbx_rearrange(f, 64, &p) == NBX_OK);
  CHECK(nbx_double_star(p, 4.0, &v) == NBX_OK);
  CHECK(v == doctest::Approx(0.25));
  CHECK(nbx_k_l1_linf(p, 0.3, &v) == NBX_OK);
  CHECK(v == doctest::Approx(0.3));
  CHECK(nbx_k_l1_l2(p, 0.5, &v) == NBX_OK);
  CHECK(v == doctest::Approx(0.5 * std::sqrt(1.75)));
  CHECK(nbx_k_l1_l2_exact(p, 2.0, &v) == NBX_OK);
  CHECK(v == doctest::Approx(1.0));
  CHECK(nbx_theta_q_norm(p, 0.5, INFINITY, 0, NBX_MODIFIED, &v) == NBX_OK);
  CHECK(v == doctest::Approx(std::pow(2.0 / 3.0, 0.25) * std::sqrt(4.0 / 3.0)));
  CHECK(nbx_theta_q_norm(p, 1.5, 2.0, 0, NBX_FULL, &v) == NBX_ERR_DOMAIN);

  nbx_weight* w = nullptr;
  CHECK(nbx_weight_parse("bogus", &w) == NBX_ERR_CONFIG);
  REQUIRE(nbx_weight_parse("one", &w) == NBX_OK);
  nbx_delta_result d{};
  CHECK(nbx_delta_norm(p, w, 20, 40, &d) == NBX_OK);
  CHECK(std::abs(d.value / std::sqrt(2.0) - 1.0) < 5e-3);
  CHECK(nbx_delta_norm_theta_restricted(p, w, 0.5, &d) == NBX_OK);
  CHECK(nbx_omega(w, 1.5, &v) == NBX_OK);
  CHECK(v == 1.0);
  nbx_weight_free(w);

  const auto path = (std::filesystem::temp_directory_path() / "nbx_capi_profile.csv").string();
  CHECK(nbx_profile_write_csv(p, path.c_str()) == NBX_OK);
  nbx_indices idx{};
  CHECK(nbx_estimate_indices_profile_csv(path.c_str(), 1e3, &idx) == NBX_OK);
  // s f**(s) = min(s, 1) on (0, 1].
  CHECK(idx.alpha0 == doctest::Approx(1.0));
  CHECK(nbx_estimate_indices_profile_csv("/nonexistent-dir/x.csv", 1e3, &idx) == NBX_ERR_IO);
  std::filesystem::remove(path);
  CHECK(nbx_profile_write_csv(p, "/nonexistent-dir/x.csv") == NBX_ERR_IO);

  nbx_profile_free(p);
  nbx_function_free(f);
}

TEST_CASE("residual functions") {
  nbx_basis* b = nullptr;
  REQUIRE(nbx_basis_integers(1, &b) == NBX_OK);
  const double c[] = {1.0};
  nbx_function* f = nullptr;
  REQUIRE(nbx_function_residual(b, c, 1, 0.45, &f) == NBX_OK);
  size_t segs = 0;
  CHECK(nbx_function_segments(f, &segs) == NBX_OK);
  CHECK(segs == 2);
  double v = 0.0;
  CHECK(nbx_function_eval(f, 0.7, &v) == NBX_OK);
  CHECK(v == doctest::Approx(2.0 - 1.0 / 0.7));
  nbx_function* g = nullptr;
  CHECK(nbx_function_scaled(f, -2.0, &g) == NBX_OK);
  CHECK(nbx_function_eval(g, 0.7, &v) == NBX_OK);
  CHECK(v == doctest::Approx(-2.0 * (2.0 - 1.0 / 0.7)));
  nbx_function_free(g);
  nbx_function_free(f);
  nbx_basis_free(b);

  const double lo[] = {0.5}, hi[] = {1.0}, al[] = {2.0}, be[] = {-1.0};
  REQUIRE(nbx_function_from_terms(lo, hi, al, be, 1, 0.5, 0.0, &f) == NBX_OK);
  CHECK(nbx_function_eval(f, 0.8, &v) == NBX_OK);
  CHECK(v == doctest::Approx(0.75));
  nbx_function_free(f);
}

TEST_CASE("gram and distances") {
  nbx_gram* g = nullptr;
  REQUIRE(nbx_gram_integer(4, 1e-12, "", &g) == NBX_OK);
  size_t n = 0;
  CHECK(nbx_gram_size(g, &n) == NBX_OK);
  CHECK(n == 4);
  double v = 0.0;
  CHECK(nbx_gram_entry(g, 0, 0, &v) == NBX_OK);
  CHECK(v == doctest::Approx(0.260661401507813));
  CHECK(nbx_gram_entry(g, 4, 0, &v) == NBX_ERR_DOMAIN);
  CHECK(nbx_gram_rhs(g, 0, &v) == NBX_OK);
  CHECK(v == doctest::Approx(0.422784335098467));

  nbx_distance d{};
  std::vector<double> c(2);
  CHECK(nbx_l2_distance(g, 2, 0, &d, c.data()) == NBX_OK);
  CHECK(d.l2_distance == doctest::Approx(0.41604033387).epsilon(1e-9));
  CHECK(std::isnan(d.d2_direct));
  CHECK(nbx_l2_distance(g, 5, 0, &d, nullptr) == NBX_ERR_LENGTH_MISMATCH);

  nbx_weight* w = nullptr;
  REQUIRE(nbx_weight_parse("power:1", &w) == NBX_OK);
  nbx_distance dd{};
  CHECK(nbx_delta_distance(g, 1, w, 10, nullptr, &dd, nullptr) == NBX_OK);
  CHECK(dd.has_delta == 1);
  CHECK(dd.delta_distance <= dd.delta_at_zero);

  nbx_sweep_options o;
  nbx_sweep_options_default(&o);
  o.with_delta = 0;
  nbx_sweep* s = nullptr;
  REQUIRE(nbx_sweep_run(4, w, &o, &s) == NBX_OK);
  size_t count = 0;
  CHECK(nbx_sweep_count(s, &count) == NBX_OK);
  CHECK(count == 3);
  size_t len = 0;
  CHECK(nbx_sweep_coeffs(s, 2, NBX_COEFFS_L2, nullptr, 0, &len) == NBX_OK);
  CHECK(len == 4);
  const char* msg = nullptr;
  CHECK(nbx_sweep_error(s, 0, &msg) == NBX_OK);
  CHECK(std::string(msg).empty());
  CHECK(nbx_sweep_get(s, 3, &d) == NBX_ERR_DOMAIN);
  nbx_sweep_free(s);
  nbx_weight_free(w);
  nbx_gram_free(g);
}

TEST_CASE("indices") {
  std::vector<double> s(256), phi(256);
  for (int i = 0; i < 256; ++i) {
    s[i] = std::exp(-100.0 * (1.0 - i / 255.0));
    phi[i] = std::sqrt(s[i]);
  }
  nbx_indices r{};
  CHECK(nbx_estimate_indices(s.data(), phi.data(), 256, 1e3, &r) == NBX_OK);
  CHECK(r.alpha_chord == doctest::Approx(0.5));
  CHECK(nbx_estimate_indices_bruteforce(s.data(), phi.data(), 256, 1e3, &r) == NBX_OK);
  phi[3] = 0.0;
  CHECK(nbx_estimate_indices(s.data(), phi.data(), 256, 1e3, &r) == NBX_ERR_NOT_QUASI_CONCAVE);
}
