#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <iostream>
#include <numbers>

#include "detline/families.hpp"
#include "detline/io.hpp"
#include "detline/oracle.hpp"
#include "detline/pr_metric.hpp"

using namespace detline;

namespace {

struct Job {
  std::string backend = "f64";
  double tol = 1e-9;
  unsigned long long seed = 0;
  std::string out;
};

Json base_report(const std::string& command, const Job& job) {
  Json r;
  r["schema"] = 1;
  r["command"] = command;
  r["backend"] = job.backend;
  r["tolerance"] = format_decimal(job.tol);
  r["seed"] = job.seed;
  return r;
}

// Square root of an exact value stays exact when it is a perfect square.
template <class S>
std::string format_sqrt(const RealOf<S>& sq) {
  if constexpr (ScalarTraits<S>::exact) {
    using boost::multiprecision::mpz_int;
    mpz_int n = numerator(sq), d = denominator(sq);
    mpz_int rn = sqrt(n), rd = sqrt(d);
    if (rn * rn == n && rd * rd == d) return Rational(rn, rd).str();
    return format_decimal(std::sqrt(sq.template convert_to<double>()));
  } else {
    using std::sqrt;
    using boost::multiprecision::sqrt;
    return ScalarTraits<S>::format(RealOf<S>(sqrt(sq)));
  }
}

template <class S>
std::string fmt(const RealOf<S>& x) {
  return ScalarTraits<S>::format(x);
}

template <class S>
bool close(const RealOf<S>& a, const RealOf<S>& b, double tol) {
  if constexpr (ScalarTraits<S>::exact) return a == b;
  double x = ScalarTraits<S>::to_double(a), y = ScalarTraits<S>::to_double(b);
  return std::abs(x - y) <= tol * std::max({std::abs(x), std::abs(y), 1e-300});
}

// Calls f with a value of the scalar type chosen by backend and field.
template <class F>
int with_scalar(const Job& job, bool complex_field, F&& f) {
  if (job.backend == "exact") {
    if (complex_field) throw Error(ErrorCode::UnsupportedBackend, "exact backend is real-only");
    return f(Rational(0));
  }
  if (job.backend == "f64") return complex_field ? f(Cplx(0)) : f(0.0);
  if (job.backend == "hp") return complex_field ? f(HpComplex(0)) : f(HpReal(0));
  throw Error(ErrorCode::Usage, "unknown backend '" + job.backend + "'");
}

void emit(const Job& job, const Json& report) { write_text(job.out, report.dump(2) + "\n"); }

struct Inputs {
  ComplexPtr complex;
  Json system;  // null when absent
};

Inputs load(const std::string& complex_path, const std::string& system_path) {
  Inputs in;
  in.complex = complex_from_json(read_json_file(complex_path));
  if (!system_path.empty()) in.system = read_json_file(system_path);
  return in;
}

template <class S>
LocalSystem<S> system_of(const Inputs& in) {
  if (in.system.is_null()) return LocalSystem<S>::trivial(in.complex, 1);
  return system_from_json<S>(in.system, in.complex);
}

bool complex_field(const Json& system) { return !system.is_null() && system_is_complex(system); }

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Json timing(std::chrono::steady_clock::time_point t0) {
  Json t;
  t["seconds"] = format_decimal(elapsed(t0));
  return t;
}

Json counts_json(const Complex& c) {
  Json a = Json::array();
  for (auto n : c.counts()) a.push_back(n);
  return a;
}

// ---- gen

int cmd_gen(const Job& job, const std::string& family, const std::vector<int>& params, const std::string& holonomy,
            const std::string& angle, int character, int random_rank) {
  auto need = [&](std::size_t n) {
    if (params.size() != n)
      throw Error(ErrorCode::Usage, family + " takes " + std::to_string(n) + " integer parameter(s)");
  };
  ComplexPtr c;
  Json system;
  auto angle_value = [&]() { return std::numbers::pi * parse_double(angle); };
  auto write_system = [&](auto tag, auto build) {
    using S = decltype(tag);
    system = system_to_json<S>(build(S{}));
  };
  const bool exact = job.backend == "exact";
  if (family == "circle") {
    need(1);
    c = circle_complex(params[0]);
    if (!angle.empty()) {
      Cplx z = std::polar(1.0, angle_value());
      write_system(Cplx{}, [&](Cplx) { return circle_system<Cplx>(c, z); });
    } else if (!holonomy.empty()) {
      if (exact)
        write_system(Rational{}, [&](Rational) { return circle_system<Rational>(c, parse_rational(holonomy)); });
      else
        write_system(0.0, [&](double) { return circle_system<double>(c, parse_double(holonomy)); });
    }
  } else if (family == "sphere") {
    need(1);
    c = sphere_complex(params[0]);
  } else if (family == "lens") {
    need(2);
    c = lens_complex(params[0]);
    const int p = params[0], q = params[1];
    lens_inverse(p, q);
    Cplx z = std::polar(1.0, 2.0 * std::numbers::pi * character / p);
    if (character % p == 0) z = Cplx(1.0);
    if (p == 2 && character % 2 != 0) {
      write_system(0.0, [&](double) { return lens_system<double>(c, p, q, -1.0); });
    } else if (exact) {
      if (z != Cplx(1.0)) throw Error(ErrorCode::UnsupportedBackend, "this character needs the complex field");
      write_system(Rational{}, [&](Rational) { return lens_system<Rational>(c, p, q, Rational(1)); });
    } else {
      write_system(Cplx{}, [&](Cplx) { return lens_system<Cplx>(c, p, q, z); });
    }
  } else if (family == "torus2") {
    need(0);
    c = torus_complex();
    if (!angle.empty()) {
      auto a = Matrix<Cplx>::from_rows({{std::polar(1.0, angle_value())}});
      auto b = Matrix<Cplx>::from_rows({{std::polar(1.0, angle_value() * std::numbers::sqrt2)}});
      write_system(Cplx{}, [&](Cplx) { return torus_system<Cplx>(c, a, b); });
    }
  } else {
    throw Error(ErrorCode::Usage, "unknown family '" + family + "' (circle, sphere, lens, torus2)");
  }
  if (random_rank > 0) {
    if (c->mode() != Mode::simplicial) throw Error(ErrorCode::Usage, "random systems need a simplicial family");
    if (exact)
      write_system(Rational{}, [&](Rational) { return random_gauge_trivial<Rational>(c, std::size_t(random_rank), job.seed); });
    else
      write_system(0.0, [&](double) { return random_gauge_trivial<double>(c, std::size_t(random_rank), job.seed); });
  }
  Json cj = complex_to_json(*c);
  if (job.out.empty() || job.out == "-") {
    Json all;
    all["complex"] = cj;
    if (!system.is_null()) all["system"] = system;
    write_text("", all.dump(2) + "\n");
  } else {
    write_text(job.out + ".complex.json", cj.dump(2) + "\n");
    if (!system.is_null()) write_text(job.out + ".system.json", system.dump(2) + "\n");
  }
  return 0;
}

// ---- check

int cmd_check(const Job& job, const std::string& complex_path, const std::string& system_path) {
  auto t0 = std::chrono::steady_clock::now();
  Json r = base_report("check", job);
  r["inputs"] = {{"complex", complex_path}, {"system", system_path}};
  Inputs in = load(complex_path, system_path);
  const Complex& c = *in.complex;
  Json checks;
  checks["boundary_squared_zero"] = true;
  checks["counts"] = counts_json(c);
  checks["euler_characteristic"] = euler_characteristic(c);
  Json diagnostics = Json::array();
  bool manifold = false;
  try {
    orient_closed_manifold(in.complex);
    manifold = true;
  } catch (const Error& e) {
    diagnostics.push_back({{"code", to_string(e.code())}, {"detail", e.detail()}});
  }
  checks["closed_oriented_manifold"] = manifold;
  return with_scalar(job, complex_field(in.system), [&](auto tag) {
    using S = decltype(tag);
    auto e = system_of<S>(in);  // throws NotFlat / Singular
    checks["flat"] = true;
    checks["rank"] = e.rank();
    bool unimodular = true;
    try {
      flat_metric(e);
    } catch (const Error& err) {
      unimodular = false;
      diagnostics.push_back({{"code", to_string(err.code())}, {"detail", err.detail()}});
    }
    checks["unimodular"] = unimodular;
    r["checks"] = checks;
    r["diagnostics"] = diagnostics;
    r["timing"] = timing(t0);
    emit(job, r);
    return 0;
  });
}

// ---- torsion

int cmd_torsion(const Job& job, const std::string& complex_path, const std::string& system_path) {
  auto t0 = std::chrono::steady_clock::now();
  Inputs in = load(complex_path, system_path);
  return with_scalar(job, complex_field(in.system), [&](auto tag) {
    using S = decltype(tag);
    Json r = base_report("torsion", job);
    r["inputs"] = {{"complex", complex_path}, {"system", system_path}};
    auto b = Bundle<S>::make(system_of<S>(in));
    Json betti = Json::array();
    for (auto x : b->homology().betti_numbers()) betti.push_back(x);
    r["betti"] = betti;
    r["euler_characteristic"] = euler_characteristic(*in.complex);
    auto t = canonical_torsion(b->chains(), b->unit(), b->homology());
    r["torsion_abs"] = fmt<S>(t.abs);
    r["torsion_mod_sign"] = scalar_to_json(t.value);
    r["cohomological_torsion_abs"] = fmt<S>(abs_of(S(S(1) / b->t_coh_unit())));
    r["timing"] = timing(t0);
    emit(job, r);
    return 0;
  });
}

// ---- pr-metric

int cmd_pr_metric(const Job& job, const std::string& complex_path, const std::string& system_path,
                  const std::string& coordinate) {
  auto t0 = std::chrono::steady_clock::now();
  Inputs in = load(complex_path, system_path);
  return with_scalar(job, complex_field(in.system), [&](auto tag) {
    using S = decltype(tag);
    Json r = base_report("pr-metric", job);
    r["inputs"] = {{"complex", complex_path}, {"system", system_path}, {"coordinate", coordinate}};
    auto e = system_of<S>(in);
    auto m = orient_closed_manifold(in.complex);
    auto pairing = std::make_shared<const DualPairing>(dual_decomposition(m));
    r["dimension"] = m.n;
    if (m.n % 2 == 0) {
      auto dd = make_duality(pairing, e, false);
      r["poincare_element_even"] = fmt<S>(poincare_element_even(dd));
      r["timing"] = timing(t0);
      emit(job, r);
      return 0;
    }
    const S x = ScalarTraits<S>::from_parts(coordinate, "");
    auto dd = make_duality(pairing, e);
    r["duality_scalar_abs"] = fmt<S>(abs_of(dd.d));
    auto sq = pr_norm_squared(dd, x);
    r["pr_norm_squared"] = fmt<S>(sq);
    r["pr_norm"] = format_sqrt<S>(sq);
    auto u = dd.e.primal->unit();
    auto v = dd.e.dual->unit();
    auto w = dd.e_star.dual->unit();
    // alpha = T^{-1}(x h_E) with unit frames: a = x / t(u)
    S a = x / dd.e.primal->t(u);
    auto parts = pr_norm_recipe(dd, u, a, v, S(1), w, S(1));
    Json recipe;
    recipe["alpha_over_beta"] = fmt<S>(parts.alpha_over_beta);
    recipe["beta_gamma"] = fmt<S>(parts.beta_gamma);
    recipe["alpha_over_gamma"] = fmt<S>(parts.alpha_over_gamma);
    recipe["product"] = fmt<S>(parts.product);
    recipe["agrees"] = close<S>(parts.product, sq, job.tol);
    r["recipe"] = recipe;
    auto csq = canonical_metric(DetLineElement<S>{dd.e.primal, LineKind::cohomological, x},
                                DetLineElement<S>{dd.e_star.primal, LineKind::cohomological,
                                                  S(cohomological_duality_scalar(dd) * x)});
    r["pr_norm_cohomological"] = format_sqrt<S>(csq);
    r["timing"] = timing(t0);
    emit(job, r);
    return 0;
  });
}

// ---- r-metric

int cmd_r_metric(const Job& job, const std::string& complex_path, const std::string& system_path,
                 const std::string& coordinate) {
  auto t0 = std::chrono::steady_clock::now();
  Inputs in = load(complex_path, system_path);
  return with_scalar(job, complex_field(in.system), [&](auto tag) {
    using S = decltype(tag);
    Json r = base_report("r-metric", job);
    r["inputs"] = {{"complex", complex_path}, {"system", system_path}, {"coordinate", coordinate}};
    auto e = system_of<S>(in);
    const S x = ScalarTraits<S>::from_parts(coordinate, "");
    auto b = Bundle<S>::make(e);
    auto rn = reidemeister_norm(*b, x);
    r["reidemeister_norm"] = fmt<S>(rn);
    auto m = orient_closed_manifold(in.complex);
    if (m.n % 2 == 1) {
      auto pairing = std::make_shared<const DualPairing>(dual_decomposition(m));
      auto dd = make_duality(pairing, e);
      auto sq = pr_norm_squared(dd, x);
      r["pr_norm"] = format_sqrt<S>(sq);
      r["equal"] = close<S>(RealOf<S>(rn * rn), sq, job.tol);
    }
    r["timing"] = timing(t0);
    emit(job, r);
    return 0;
  });
}

// ---- correspond

int cmd_correspond(const Job& job, const std::string& complex_path, const std::string& e_path,
                   const std::string& f_path, const std::string& phi_seed) {
  auto t0 = std::chrono::steady_clock::now();
  Inputs in = load(complex_path, e_path);
  Json f_json = read_json_file(f_path);
  const bool cf = complex_field(in.system) || complex_field(f_json);
  return with_scalar(job, cf, [&](auto tag) {
    using S = decltype(tag);
    Json r = base_report("correspond", job);
    r["inputs"] = {{"complex", complex_path}, {"system_e", e_path}, {"system_f", f_path}, {"phi_seed", phi_seed}};
    auto e = system_of<S>(in);
    auto f = system_from_json<S>(f_json, in.complex);
    auto phi = propagate_iso(e, f, ScalarTraits<S>::from_parts(phi_seed, ""));
    auto be = Bundle<S>::make(e), bes = Bundle<S>::make(e.dual());
    auto bf = Bundle<S>::make(f), bfs = Bundle<S>::make(f.dual());
    r["euler_characteristic"] = euler_characteristic(*in.complex);
    r["phi_hat"] = scalar_to_json(correspondence_hat(phi, *be, *bf));
    r["phi_check"] = scalar_to_json(correspondence_check_map(phi, *be, *bf));
    auto sides = correspondence_adjoint_identity(phi, be, bes, bf, bfs, S(1), S(1));
    r["adjoint_identity"] = {{"lhs", fmt<S>(sides.lhs)}, {"rhs", fmt<S>(sides.rhs)},
                             {"equal", close<S>(sides.lhs, sides.rhs, job.tol)}};
    if (in.complex->mode() == Mode::simplicial) {
      auto sd = barycentric_subdivision(in.complex);
      auto check = correspondence_check(phi, be, bf, *sd);
      r["subdivision_check"] = {{"coarse", scalar_to_json(check.coarse_scalar)},
                                {"fine", scalar_to_json(check.fine_scalar)},
                                {"volumes_agree", check.volumes_agree},
                                {"ok", check.ok}};
    }
    r["timing"] = timing(t0);
    emit(job, r);
    return 0;
  });
}

// ---- oracle

int cmd_oracle(const Job& job, const std::string& complex_path, const std::string& system_path, bool thm53,
               bool random_ip, bool non_dual) {
  auto t0 = std::chrono::steady_clock::now();
  Inputs in = load(complex_path, system_path);
  return with_scalar(job, complex_field(in.system), [&](auto tag) {
    using S = decltype(tag);
    Json r = base_report("oracle", job);
    r["inputs"] = {{"complex", complex_path}, {"system", system_path}};
    auto e = system_of<S>(in);
    auto b = Bundle<S>::make(e);
    auto ip = random_ip || thm53 ? random_inner_product(*in.complex, e.rank(), job.seed)
                                 : std::vector<std::vector<Matrix<Cplx>>>{};
    InnerProduct chain_ip = ip.empty() ? identity_inner_product(to_cplx(b->chains())) : InnerProduct(ip.begin(), ip.end());
    auto rep = rs_metric_finite(to_cplx(b->chains()), to_cplx(b->homology()), chain_ip);
    Json spectral = Json::array();
    for (std::size_t k = 0; k < rep.eigenvalues.size(); ++k) {
      Json d;
      d["degree"] = rep.lo + int(k);
      Json ev = Json::array();
      for (double x : rep.eigenvalues[k]) ev.push_back(format_decimal(x));
      d["eigenvalues"] = ev;
      d["det_prime"] = format_decimal(rep.det_prime[k]);
      d["zero_modes"] = rep.zero_modes[k];
      d["betti"] = rep.betti[k];
      d["harmonic_volume"] = format_decimal(rep.harmonic_volume[k]);
      spectral.push_back(d);
    }
    r["spectral"] = spectral;
    r["rs_metric"] = format_decimal(rep.rs_metric);
    r["t_metric"] = format_decimal(rep.t_metric);
    r["rs_equals_t"] = std::abs(rep.rs_metric - rep.t_metric) <= 1e-8 * std::max(rep.rs_metric, rep.t_metric);
    if (thm53) {
      auto dual = non_dual ? random_inner_product(*in.complex, e.rank(), job.seed + 1) : dual_inner_product(ip);
      auto bs = Bundle<S>::make(e.dual());
      auto t = thm53_product_check(b, bs, ip, dual, S(1), S(1));
      r["thm53"] = {{"product", format_decimal(t.product)},
                    {"canonical", format_decimal(t.canonical)},
                    {"dual_pair", !non_dual},
                    {"equal", t.equal}};
    }
    r["timing"] = timing(t0);
    emit(job, r);
    return 0;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Determinant-line invariants of flat bundles over closed manifolds"};
  app.require_subcommand(1);
  Job job;
  app.add_option("--backend", job.backend, "exact, f64 or hp")->check(CLI::IsMember({"exact", "f64", "hp"}));
  app.add_option("--tol", job.tol, "relative tolerance for equality verdicts")->check(CLI::PositiveNumber);
  app.add_option("--seed", job.seed, "seed for randomized data");
  app.add_option("--out", job.out, "output path (gen: file prefix)");

  std::string complex_path, system_path, f_path, coordinate = "1", phi_seed = "1";
  std::string family, holonomy, angle;
  std::vector<int> params;
  int character = 1, random_rank = 0;
  bool thm53 = false, random_ip = false, non_dual = false;

  auto* gen = app.add_subcommand("gen", "write a complex and optional local system");
  gen->add_option("family", family, "circle, sphere, lens or torus2")->required();
  gen->add_option("params", params, "integer parameters");
  gen->add_option("--holonomy", holonomy, "real holonomy of the circle");
  gen->add_option("--angle", angle, "unit holonomy exp(i pi a); torus: a and a sqrt 2");
  gen->add_option("--character", character, "lens character k: zeta = exp(2 pi i k / p)");
  gen->add_option("--random-rank", random_rank, "random gauge-trivial system of this rank (uses --seed)");

  auto add_inputs = [&](CLI::App* sub) {
    sub->add_option("complex", complex_path, "complex JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("system", system_path, "local system JSON (default: trivial rank 1)")->check(CLI::ExistingFile);
  };
  auto* check = app.add_subcommand("check", "validate a complex and system");
  add_inputs(check);
  auto* torsion = app.add_subcommand("torsion", "torsion with unit frames");
  add_inputs(torsion);
  auto* pr = app.add_subcommand("pr-metric", "Poincare-Reidemeister metric and the three-number recipe");
  add_inputs(pr);
  pr->add_option("--coordinate", coordinate, "element x h_E");
  auto* rm = app.add_subcommand("r-metric", "Reidemeister metric of a unimodular system");
  add_inputs(rm);
  rm->add_option("--coordinate", coordinate, "element x h_E");
  auto* corr = app.add_subcommand("correspond", "correspondence induced by det E -> det F");
  corr->add_option("complex", complex_path, "complex JSON")->required()->check(CLI::ExistingFile);
  corr->add_option("system_e", system_path, "system E")->required()->check(CLI::ExistingFile);
  corr->add_option("system_f", f_path, "system F")->required()->check(CLI::ExistingFile);
  corr->add_option("--phi-seed", phi_seed, "value of phi on the first cell of each component");
  auto* oracle = app.add_subcommand("oracle", "finite-dimensional Ray-Singer oracle");
  add_inputs(oracle);
  oracle->add_flag("--thm53", thm53, "product check with a random dual inner-product pair");
  oracle->add_flag("--random-ip", random_ip, "random inner product for the spectral report");
  oracle->add_flag("--non-dual", non_dual, "negative control: unrelated inner product on E*");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Tolerance t = tolerance();
  t.flat = job.tol;
  set_tolerance(t);
  try {
    if (*gen) return cmd_gen(job, family, params, holonomy, angle, character, random_rank);
    if (*check) return cmd_check(job, complex_path, system_path);
    if (*torsion) return cmd_torsion(job, complex_path, system_path);
    if (*pr) return cmd_pr_metric(job, complex_path, system_path, coordinate);
    if (*rm) return cmd_r_metric(job, complex_path, system_path, coordinate);
    if (*corr) return cmd_correspond(job, complex_path, system_path, f_path, phi_seed);
    if (*oracle) return cmd_oracle(job, complex_path, system_path, thm53, random_ip, non_dual);
  } catch (const Error& e) {
    Json r;
    r["schema"] = 1;
    r["error"] = {{"code", to_string(e.code())}, {"detail", e.detail()}};
    write_text(job.out.empty() || *gen ? "" : job.out, r.dump(2) + "\n");
    return is_validation_error(e.code()) ? 2 : 1;
  }
  return 2;
}
