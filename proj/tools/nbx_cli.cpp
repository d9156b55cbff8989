// nbx: batch front-end over the C interface.

#include "nbx/nbx.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitInternal = 1;

struct Failure {
  nbx_status status;
  std::string message;
};

int exit_code(nbx_status s) {
  switch (s) {
    case NBX_OK:
      return kExitOk;
    case NBX_ERR_TOLERANCE_NOT_REACHED:
    case NBX_ERR_NON_CONVERGENCE:
    case NBX_ERR_DIVERGENCE:
    case NBX_ERR_INSTABILITY:
    case NBX_ERR_ILL_CONDITIONED:
    case NBX_ERR_OPTIMIZATION_FAILURE:
      return kExitNumeric;
    case NBX_ERR_INTERNAL:
      return kExitInternal;
    default:
      return kExitConfig;
  }
}

void check(nbx_status s) {
  if (s != NBX_OK) throw Failure{s, nbx_last_error()};
}

[[noreturn]] void config_error(const std::string& msg) { throw Failure{NBX_ERR_CONFIG, msg}; }

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Basis = std::unique_ptr<nbx_basis, Deleter<nbx_basis, nbx_basis_free>>;
using Function = std::unique_ptr<nbx_function, Deleter<nbx_function, nbx_function_free>>;
using Profile = std::unique_ptr<nbx_profile, Deleter<nbx_profile, nbx_profile_free>>;
using Weight = std::unique_ptr<nbx_weight, Deleter<nbx_weight, nbx_weight_free>>;
using Gram = std::unique_ptr<nbx_gram, Deleter<nbx_gram, nbx_gram_free>>;
using Sweep = std::unique_ptr<nbx_sweep, Deleter<nbx_sweep, nbx_sweep_free>>;

Weight parse_weight(const std::string& spec) {
  nbx_weight* w = nullptr;
  check(nbx_weight_parse(spec.c_str(), &w));
  return Weight(w);
}

std::string cache_dir() {
  const char* d = std::getenv("NBX_CACHE_DIR");
  return d ? d : "";
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (!std::filesystem::is_directory(dir))
    throw Failure{NBX_ERR_IO, "cannot create output directory " + dir};
}

// --- function specs --------------------------------------------------------

Basis basis_from_json(const json& j) {
  nbx_basis* b = nullptr;
  if (j.contains("integer_n")) {
    check(nbx_basis_integers(j.at("integer_n").get<std::size_t>(), &b));
  } else if (j.contains("dilations")) {
    const auto d = j.at("dilations").get<std::vector<double>>();
    check(nbx_basis_from(d.data(), d.size(), &b));
  } else {
    config_error("basis spec needs \"dilations\" or \"integer_n\"");
  }
  return Basis(b);
}

Function residual(const nbx_basis* b, const std::vector<double>& c, double x_cut) {
  nbx_function* f = nullptr;
  check(nbx_function_residual(b, c.data(), c.size(), x_cut, &f));
  return Function(f);
}

Function function_from_json(const json& j) {
  nbx_function* f = nullptr;
  if (j.contains("segments")) {
    std::vector<double> lo, hi, al, be;
    for (const auto& s : j.at("segments")) {
      if (!s.is_array() || s.size() != 4) config_error("segment must be [x_lo, x_hi, alpha, beta]");
      lo.push_back(s[0].get<double>());
      hi.push_back(s[1].get<double>());
      al.push_back(s[2].get<double>());
      be.push_back(s[3].get<double>());
    }
    check(nbx_function_from_terms(lo.data(), hi.data(), al.data(), be.data(), lo.size(),
                                  j.value("x_cut", lo.empty() ? 0.5 : lo.back()),
                                  j.value("tail", 0.0), &f));
    return Function(f);
  }
  const json& bj = j.contains("basis") ? j.at("basis") : j;
  Basis b = basis_from_json(bj);
  const auto c = j.value("coeffs", std::vector<double>{});
  return residual(b.get(), c, j.value("x_cut", 0.0));
}

Function parse_function(const std::string& spec, unsigned long long seed) {
  nbx_function* f = nullptr;
  if (spec == "chi") {
    check(nbx_function_constant(1.0, &f));
    return Function(f);
  }
  if (spec == "zero") {
    check(nbx_function_constant(0.0, &f));
    return Function(f);
  }
  if (spec.rfind("step", 0) == 0) {
    double width = 0.5, value = 2.0;
    if (spec.size() > 4) {
      if (spec[4] != ':' || std::sscanf(spec.c_str() + 5, "%lf:%lf", &width, &value) < 1)
        config_error("step spec is step[:width[:value]]");
    }
    check(nbx_function_step(value, width, &f));
    return Function(f);
  }
  if (spec.rfind("random:", 0) == 0) {
    const int n = std::atoi(spec.c_str() + 7);
    if (n < 1) config_error("random spec is random:<n> with n >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    std::vector<double> c(static_cast<std::size_t>(n));
    for (auto& v : c) v = dist(rng);
    nbx_basis* b = nullptr;
    check(nbx_basis_integers(static_cast<std::size_t>(n), &b));
    Basis basis(b);
    return residual(basis.get(), c, 0.0);
  }
  json j;
  try {
    if (!spec.empty() && spec.front() == '{') {
      j = json::parse(spec);
    } else {
      std::ifstream in(spec);
      if (!in) config_error("unknown function spec: " + spec);
      j = json::parse(in);
    }
  } catch (const json::exception& e) {
    config_error(std::string("malformed function JSON: ") + e.what());
  }
  try {
    return function_from_json(j);
  } catch (const json::exception& e) {
    config_error(std::string("malformed function JSON: ") + e.what());
  }
}

// --- commands ------------------------------------------------------------------

struct Options {
  std::size_t n = 0;
  std::size_t n_max = 4;
  std::string weight = "one";
  double tol = 1e-12;
  int theta_grid = 20;
  int t_grid = 40;
  std::string out = ".";
  unsigned long long seed = 1;
  bool constrained = false;
  bool no_delta = false;
  bool no_cross_check = false;
  std::size_t budget = 80;
  std::size_t grid_size = 256;
  std::string function = "chi";
  std::string profile;
  double gamma_cap = 1e3;
};

int cmd_gram(const Options& o) {
  ensure_dir(o.out);
  nbx_gram* g = nullptr;
  check(nbx_gram_integer(o.n, o.tol, cache_dir().c_str(), &g));
  Gram gram(g);
  const std::string gp = o.out + "/gram.csv", bp = o.out + "/b.csv";
  check(nbx_gram_write_csv(gram.get(), gp.c_str(), bp.c_str()));
  std::cout << "wrote " << gp << " and " << bp << " (n = " << o.n << ")\n";
  return kExitOk;
}

json coeff_array(const nbx_sweep* s, std::size_t i, nbx_coeff_set which) {
  std::size_t len = 0;
  check(nbx_sweep_coeffs(s, i, which, nullptr, 0, &len));
  std::vector<double> c(len);
  check(nbx_sweep_coeffs(s, i, which, c.data(), len, &len));
  return c;
}

int cmd_sweep(const Options& o) {
  ensure_dir(o.out);
  Weight w = parse_weight(o.weight);
  nbx_sweep_options so;
  nbx_sweep_options_default(&so);
  so.constrained = o.constrained ? 1 : 0;
  so.with_delta = o.no_delta ? 0 : 1;
  so.cross_check = o.no_cross_check ? 0 : 1;
  so.delta_budget = o.budget;
  so.theta_levels = o.theta_grid;
  so.t_levels = o.t_grid;
  so.tol = o.tol;
  const std::string cache = cache_dir();
  so.cache_dir = cache.c_str();
  nbx_sweep* sp = nullptr;
  check(nbx_sweep_run(o.n_max, w.get(), &so, &sp));
  Sweep sweep(sp);

  const std::string csv = o.out + "/sweep.csv";
  check(nbx_sweep_write_csv(sweep.get(), csv.c_str()));

  std::size_t count = 0;
  check(nbx_sweep_count(sweep.get(), &count));
  json coeffs = json::array();
  std::ostringstream summary;
  summary << "weight " << o.weight << ", n_max " << o.n_max
          << (o.constrained ? ", constrained" : "") << "\n";
  bool failed = false;
  for (std::size_t i = 0; i < count; ++i) {
    nbx_distance d{};
    check(nbx_sweep_get(sweep.get(), i, &d));
    json rec;
    rec["n"] = d.n;
    if (d.failed) {
      const char* msg = "";
      check(nbx_sweep_error(sweep.get(), i, &msg));
      rec["error"] = msg;
      summary << "n = " << d.n << ": failed: " << msg << "\n";
      failed = true;
      coeffs.push_back(rec);
      continue;
    }
    rec["l2_distance"] = d.l2_distance;
    rec["l2_coeffs"] = coeff_array(sweep.get(), i, NBX_COEFFS_L2);
    rec["cond_estimate"] = d.cond_estimate;
    rec["normal_residual"] = d.normal_residual;
    rec["regularized"] = d.regularized != 0;
    if (!std::isnan(d.d2_direct)) rec["d2_direct"] = d.d2_direct;
    rec["d2_projection"] = d.d2_projection;
    char line[256];
    std::snprintf(line, sizeof line, "n = %zu: d = %.10f, cond = %.3g", d.n, d.l2_distance,
                  d.cond_estimate);
    summary << line;
    if (d.has_delta) {
      rec["delta_distance"] = d.delta_distance;
      rec["delta_at_l2"] = d.delta_at_l2;
      rec["delta_coeffs"] = coeff_array(sweep.get(), i, NBX_COEFFS_DELTA);
      rec["iterations"] = d.iterations;
      rec["budget_exhausted"] = d.budget_exhausted != 0;
      std::snprintf(line, sizeof line, ", delta = %.8f (at L2 minimiser %.8f)%s",
                    d.delta_distance, d.delta_at_l2,
                    d.budget_exhausted ? ", budget exhausted" : "");
      summary << line;
    }
    summary << "\n";
    coeffs.push_back(rec);
  }
  {
    std::ofstream out(o.out + "/coeffs.json");
    out << coeffs.dump(1) << "\n";
  }
  {
    std::ofstream out(o.out + "/summary.txt");
    out << summary.str();
  }
  std::cout << summary.str();
  return failed ? kExitNumeric : kExitOk;
}

int cmd_deltanorm(const Options& o) {
  Function f = parse_function(o.function, o.seed);
  Weight w = parse_weight(o.weight);
  nbx_profile* p = nullptr;
  check(nbx_rearrange(f.get(), o.grid_size, &p));
  Profile prof(p);
  nbx_delta_result r{};
  check(nbx_delta_norm(prof.get(), w.get(), o.theta_grid, o.t_grid, &r));
  json j;
  j["value"] = r.value;
  j["theta_star"] = r.theta_star;
  j["t_star"] = r.t_star;
  j["certificate"] = {{"refined_value", r.refined_value}, {"relative_change", r.certificate}};
  j["weight"] = o.weight;
  std::cout << j.dump() << "\n";
  return kExitOk;
}

int cmd_profile(const Options& o) {
  Function f = parse_function(o.function, o.seed);
  nbx_profile* p = nullptr;
  check(nbx_rearrange(f.get(), o.grid_size, &p));
  Profile prof(p);
  const std::filesystem::path out(o.out);
  if (out.has_parent_path()) ensure_dir(out.parent_path().string());
  check(nbx_profile_write_csv(prof.get(), o.out.c_str()));
  double l1 = 0.0;
  check(nbx_profile_l1_mass(prof.get(), &l1));
  json j;
  j["path"] = o.out;
  j["l1_mass"] = l1;
  std::cout << j.dump() << "\n";
  return kExitOk;
}

int cmd_indices(const Options& o) {
  if (o.profile.empty()) config_error("indices needs --profile");
  nbx_indices r{};
  check(nbx_estimate_indices_profile_csv(o.profile.c_str(), o.gamma_cap, &r));
  json j;
  j["alpha0"] = r.alpha0;
  j["beta0"] = r.beta0;
  j["alpha_chord"] = r.alpha_chord;
  j["beta_chord"] = r.beta_chord;
  j["gamma_cap"] = r.gamma_cap;
  std::cout << j.dump() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nbx: fractional-part dilation bases, K-functionals and extrapolation norms"};
  app.require_subcommand(1);
  Options o;

  auto* gram = app.add_subcommand("gram", "write the integer-dilation Gram matrix and b vector");
  gram->add_option("--n", o.n, "basis size")->required();
  gram->add_option("--tol", o.tol, "pairing tolerance");
  gram->add_option("--out", o.out, "output directory");

  auto* sweep = app.add_subcommand("sweep", "L2 and delta-norm distances for n = 1, 2, 4, ...");
  sweep->add_option("--n-max", o.n_max, "largest basis size (<= 512)");
  sweep->add_option("--weight", o.weight, "one | power:<alpha> | logdamp");
  sweep->add_option("--tol", o.tol, "pairing tolerance");
  sweep->add_option("--theta-grid", o.theta_grid, "theta levels (theta = 1 - 2^-j)");
  sweep->add_option("--t-grid", o.t_grid, "t levels (t = 2^-i/2)");
  sweep->add_option("--out", o.out, "output directory");
  sweep->add_option("--seed", o.seed, "seed (recorded; the sweep itself is deterministic)");
  sweep->add_option("--budget", o.budget, "subgradient iterations per n");
  sweep->add_flag("--constrained", o.constrained, "enforce the endpoint constraint explicitly");
  sweep->add_flag("--no-delta", o.no_delta, "skip the delta-norm minimisation");
  sweep->add_flag("--no-cross-check", o.no_cross_check, "skip the direct d^2 integration");

  auto* delta = app.add_subcommand("deltanorm", "delta norm of one function as JSON");
  delta->add_option("--function", o.function,
                    "chi | zero | step[:w[:v]] | random:<n> | JSON text | JSON file");
  delta->add_option("--weight", o.weight, "one | power:<alpha> | logdamp");
  delta->add_option("--theta-grid", o.theta_grid, "theta levels");
  delta->add_option("--t-grid", o.t_grid, "t levels");
  delta->add_option("--grid-size", o.grid_size, "rearrangement resolution (>= 16)");
  delta->add_option("--seed", o.seed, "seed for random:<n>");

  auto* profile = app.add_subcommand("profile", "dump s,fstar,fstarstar for one function");
  profile->add_option("--function", o.function, "function spec as for deltanorm");
  profile->add_option("--grid-size", o.grid_size, "rearrangement resolution (>= 16)");
  profile->add_option("--out", o.out, "output CSV path")->required();
  profile->add_option("--seed", o.seed, "seed for random:<n>");

  auto* indices = app.add_subcommand("indices", "dilation indices of s f**(s) from a profile CSV");
  indices->add_option("--profile", o.profile, "profile CSV")->required();
  indices->add_option("--gamma-cap", o.gamma_cap, "largest admissible gamma");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (o.tol <= 0.0) config_error("--tol must be positive");
    if (*gram) return cmd_gram(o);
    if (*sweep) return cmd_sweep(o);
    if (*delta) return cmd_deltanorm(o);
    if (*profile) return cmd_profile(o);
    if (*indices) return cmd_indices(o);
  } catch (const Failure& f) {
    std::cerr << "nbx: " << nbx_status_name(f.status) << ": " << f.message << "\n";
    return exit_code(f.status);
  }
  return kExitConfig;
}
