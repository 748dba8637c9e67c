#include <doctest.h>

#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "rinv/profile_function.hpp"
#include "rinv/quadrature.hpp"
#include "rinv/root_find.hpp"
#include "rinv/sampling.hpp"
#include "rinv/solutions.hpp"

using namespace rinv;

namespace {

bool has_violation(const SolutionInstance& inst, const std::string& name) {
  for (const auto& v : validate(inst))
    if (v.constraint == name) return true;
  return false;
}

SolutionInstance affine_e0a(double b1) {
  SolutionInstance s;
  s.family = Family::E0Aplus;
  s.external = {{1, 0, 0}, {0, 0, 1}, 1.0};
  s.params.A = 1.0;
  s.params.lambda1 = {0, 0, 1};
  s.functions["B"] = ProfileFunction::affine(0.0, b1);
  return s;
}

}  // namespace

TEST_CASE("validation") {
  for (auto f : {Family::E0E, Family::E0Aplus, Family::A0eE, Family::H0E}) CHECK(validate(stock_instance(f)).empty());

  // g = (1,0,0) satisfies everything except g3 != 0.
  auto e = stock_instance(Family::E0E);
  e.external = {{1, 0, 0}, {0, 0, 1}, 1.4};
  e.params.lambda1 = {1, 0, 0};
  const auto v = validate(e);
  REQUIRE(v.size() == 1);
  CHECK(v[0].constraint == "g3 != 0");

  auto k = stock_instance(Family::E0Aplus);
  k.external.kappa = 1.4;
  CHECK(has_violation(k, "kappa must equal 1"));
  try {
    require_valid(k);
    FAIL("expected ConfigError");
  } catch (const ConfigError& err) {
    CHECK(std::string(err.what()).find("kappa must equal 1") != std::string::npos);
  }

  auto h = stock_instance(Family::H0E);
  h.params.c1 = h.params.c2 = 1.0;
  CHECK(has_violation(h, "c1²+c2² = 1"));

  auto a = stock_instance(Family::A0eE);
  a.external.omega = {0, 0, 2};
  CHECK(has_violation(a, "|Omega| = 1"));

  auto missing = stock_instance(Family::E0E);
  missing.functions.erase("p");
  CHECK_FALSE(validate(missing).empty());
  CHECK_THROWS_AS(missing.fn("p"), ConfigError);
  CHECK_THROWS_AS(family_from_string("E1E"), ConfigError);
  CHECK(family_from_string("H0E") == Family::H0E);
}

TEST_CASE("E0E invariants at t = 1, x = 0") {
  const auto inst = stock_instance(Family::E0E);
  const auto e = evaluate(inst, 1.0, {0, 0, 0});
  REQUIRE(e.in_domain);
  const auto& g = inst.external.g;
  const auto& om = inst.external.omega;
  const auto& l = inst.params.lambda1;
  CHECK(e.r[0] == doctest::Approx(inst.params.c0));
  CHECK(e.r[1] == doctest::Approx((l[1] * g[0] - l[0] * g[1]) / om[2] + inst.params.c0 * l[2] / g[2]));
  CHECK(e.state.rho == doctest::Approx(inst.fn("p").d1(e.r[0])));
  CHECK(e.state.p == doctest::Approx(inst.fn("p").value(e.r[0])));
}

TEST_CASE("E0Aplus at the zero invariant") {
  const auto inst = stock_instance(Family::E0Aplus);
  // r0 = 0 and r1 = 0 at the origin at t = 0.
  const auto e = evaluate(inst, 0.0, {0, 0, 0});
  REQUIRE(e.in_domain);
  CHECK(e.r[0] == 0.0);
  CHECK(e.r[1] == 0.0);
  CHECK(e.state.rho == doctest::Approx(1.0));
  CHECK(e.state.p == doctest::Approx(inst.params.A));

  // The implicit relation holds wherever the solver succeeded.
  const auto sp = e0aplus_speed(inst);
  SampleSpec spec{{0, -0.3, -0.3, -0.3}, {0.3, 0.3, 0.3, 0.3}, 100, 9};
  for (const auto& p : halton_points(spec)) {
    const Vec3 x{p[1], p[2], p[3]};
    const auto r = evaluate(inst, p[0], x);
    REQUIRE(r.in_domain);
    const double rhs = (sp.alpha * inst.fn("B").value(r.r[1]) + sp.K) * p[0] + dot(inst.params.lambda1, x);
    CHECK(std::abs(r.r[1] - rhs) <= 1e-11 * (1 + std::abs(r.r[1])));
  }
}

TEST_CASE("A0eE has exactly constant density and pressure") {
  const auto inst = stock_instance(Family::A0eE);
  SampleSpec spec{{0, -2, -2, -2}, {2, 2, 2, 2}, 200, 11};
  for (const auto& p : halton_points(spec)) {
    const auto e = evaluate(inst, p[0], {p[1], p[2], p[3]});
    REQUIRE(e.in_domain);
    CHECK(e.state.rho == inst.params.rho0);
    CHECK(e.state.p == inst.params.p0);
  }
}

TEST_CASE("H0E satisfies the Lambert identity and its implicit invariant") {
  const auto inst = stock_instance(Family::H0E);
  const auto& P = inst.params;
  const auto& g = inst.external.g;
  const double K = P.c2 * (P.c0 + P.c1 * g[1] - P.c2 * g[0]);
  SampleSpec spec{{0, -1, -1, -1}, {1, 1, 1, 1}, 100, 13};
  std::size_t checked = 0;
  for (const auto& p : halton_points(spec)) {
    const Vec3 x{p[1], p[2], p[3]};
    const auto e = evaluate(inst, p[0], x);
    if (!e.in_domain) continue;
    ++checked;
    const double E = e.state.v[1] + g[0];
    const double W = -std::log(E);
    const double s = (P.c1 * (e.r[0] + inst.fn("F1").value(e.r[1])) - g[0]) / K;
    const double phi = std::exp(s) / K;
    CHECK(W * std::exp(W) == doctest::Approx(phi).epsilon(1e-12));
    CHECK(e.state.v[0] == doctest::Approx(g[1] + P.c1 / P.c2 * std::exp(-W + s)).epsilon(1e-12));
    const double r1 = -(P.c1 * g[1] - P.c2 * g[0] + E) * p[0] + P.c1 * x[0] + P.c2 * x[1];
    CHECK(std::abs(e.r[1] - r1) <= 1e-10 * (1 + std::abs(r1)));
    CHECK(e.r[0] == doctest::Approx(P.c0 * p[0] + P.c1 * x[0] + P.c2 * x[1]));
    CHECK(e.state.p == P.p0);
  }
  CHECK(checked >= 90);
}

TEST_CASE("H0E velocity integral matches independent quadrature") {
  const auto inst = stock_instance(Family::H0E);
  const auto& g = inst.external.g;
  const auto& P = inst.params;
  const double r1 = 0.3;
  auto v12 = [&](double r0) {
    const double K = P.c2 * (P.c0 + P.c1 * g[1] - P.c2 * g[0]);
    const double s = (P.c1 * (r0 + inst.fn("F1").value(r1)) - g[0]) / K;
    // Newton on w e^w = phi, independent of the library's Lambert solver.
    const double phi = std::exp(s) / K;
    double w = std::log1p(phi);
    for (int i = 0; i < 60; ++i) w -= (w * std::exp(w) - phi) / (std::exp(w) * (1 + w));
    return std::pair{g[1] + P.c1 / P.c2 * std::exp(-w + s), std::exp(-w) - g[0]};
  };
  auto integrand = [&](double q) {
    const auto [v1, v2] = v12(q);
    return g[2] / (P.c0 + P.c1 * v1 + P.c2 * v2);
  };
  for (double r0 : {-0.8, 0.25, 1.1}) {
    // Composite Simpson with 20000 panels.
    const int n = 20000;
    const double h = r0 / n;
    double s = integrand(0) + integrand(r0);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * integrand(i * h);
    const double integral = s * h / 3.0;
    CHECK(profile_state(inst, r0, r1).v[2] == doctest::Approx(integral + inst.fn("F2").value(r1)).epsilon(1e-11));
  }
}

TEST_CASE("adaptive quadrature") {
  const auto r = integrate_gk15([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-12);
  CHECK(r.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
  CHECK(integrate_gk15([](double x) { return x * x; }, 2.0, 0.0, 1e-12).value == doctest::Approx(-8.0 / 3.0));
  CHECK(integrate_gk15([](double) { return 1.0; }, 0.5, 0.5, 1e-12).value == 0.0);
  const auto peaked = integrate_gk15([](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0, 1e-12);
  CHECK(peaked.value == doctest::Approx(2.0 * std::atan(100.0) * 100.0).epsilon(1e-10));
}

TEST_CASE("implicit solver") {
  const auto a = implicit_solve([](double r) { return r - 3.0; }, [](double) { return 1.0; }, 0.0, {-1.0, 1.0});
  CHECK(a.root == doctest::Approx(3.0).epsilon(1e-14));

  auto g = [](double r) { return r - 0.5 * std::sin(r) - 1.0; };
  const auto b = implicit_solve(g, [](double r) { return 1.0 - 0.5 * std::cos(r); }, 0.0, {-1.0, 1.0});
  const double want = oracle::bisect(g, 0.0, 4.0, 1000000);
  CHECK(std::abs(b.root - want) <= 1e-10);
  CHECK(std::abs(g(b.root)) <= 1e-12 * (1 + std::abs(b.root)));

  // Flat slope falls back to bisection.
  const auto c = implicit_solve([](double r) { return r * r * r; }, [](double) { return 0.0; }, 0.5, {-1.0, 2.0});
  CHECK(std::abs(c.root) <= 1e-4);

  try {
    implicit_solve([](double r) { return r * r + 1.0; }, [](double r) { return 2.0 * r; }, 0.0, {-1.0, 1.0});
    FAIL("expected RootFindError");
  } catch (const RootFindError& e) {
    CHECK(std::string(e.what()).find("root not bracketed") != std::string::npos);
    CHECK(e.lo() < -1.0);
  }
  RootOptions few;
  few.max_iterations = 2;
  few.residual_tol = 0.0;
  CHECK_THROWS_WITH_AS(implicit_solve(g, [](double) { return 0.0; }, 0.0, {-4.0, 4.0}, few),
                       doctest::Contains("no convergence"), RootFindError);
}

TEST_CASE("closed-form catastrophe time") {
  CHECK(catastrophe_time(affine_e0a(1.0)) == doctest::Approx(1.0));
  CHECK(catastrophe_time(affine_e0a(2.0)) == doctest::Approx(0.5));
  auto four = affine_e0a(1.0);
  four.params.A = 4.0;
  CHECK(catastrophe_time(four) == doctest::Approx(0.5));
  auto tilted = affine_e0a(1.0);
  tilted.external.omega = {0, 0, 3};
  tilted.params.lambda1 = {0, 0, 2};
  CHECK(catastrophe_time(tilted) == doctest::Approx(0.5));
  CHECK_THROWS_AS(catastrophe_time(stock_instance(Family::E0Aplus)), DomainError);
  const auto sn = stock_instance(Family::E0Aplus);
  const auto& om = sn.external.omega;
  CHECK(linearized_catastrophe_time(sn) ==
        doctest::Approx(norm(om) / (std::sqrt(sn.params.A) * dot(sn.params.lambda1, om))));
}

TEST_CASE("empirical blow-up for affine B") {
  auto inst = stock_instance(Family::E0Aplus);
  const auto sp = e0aplus_speed(inst);
  inst.functions["B"] = ProfileFunction::affine(-sp.K / sp.alpha, 0.8);
  const double t0 = catastrophe_time(inst);
  const auto res = empirical_blowup_time(inst, {{0, 0, 0}}, 2.0 * t0);
  CHECK(std::abs(res.time - t0) <= 1e-4 * t0);
  CHECK_THROWS_AS(empirical_blowup_time(inst, {{0, 0, 0}}, 0.5 * t0), DomainError);
}

TEST_CASE("scan line") {
  const auto inst = stock_instance(Family::E0Aplus);
  const auto one = blowup_scan_line(inst, 1, 3.0);
  REQUIRE(one.size() == 1);
  const auto many = blowup_scan_line(inst, 5, 2.0);
  CHECK(many.size() == 5);
  const Vec3 d = many[4] - many[0];
  CHECK(norm(d) == doctest::Approx(4.0));
  CHECK(norm(cross(d, inst.params.lambda1)) <= 1e-12);
  CHECK(norm(many[2] - one[0]) <= 1e-12);
  CHECK_THROWS_AS(blowup_scan_line(inst, 0, 1.0), DomainError);
}

TEST_CASE("chart round trip") {
  std::mt19937_64 rng(51);
  for (auto f : {Family::E0E, Family::E0Aplus, Family::A0eE, Family::H0E}) {
    const auto inst = stock_instance(f);
    const auto chart = as_chart(inst);
    CHECK(chart.k() == 2);
    std::uniform_real_distribution<double> T(0.0, 0.2), X(-0.3, 0.3);
    for (int n = 0; n < 100; ++n) {
      const double t = T(rng);
      const Vec3 x{X(rng), X(rng), X(rng)};
      const auto e = evaluate(inst, t, x);
      REQUIRE(e.in_domain);
      const auto r = riemann_invariants(chart, t, x, e.state);
      CHECK(std::abs(r[0] - e.r[0]) <= 1e-10 * (1 + std::abs(e.r[0])));
      CHECK(std::abs(r[1] - e.r[1]) <= 1e-10 * (1 + std::abs(e.r[1])));
      const auto u = chart.profile(e.r);
      CHECK(u.rho == doctest::Approx(e.state.rho));
      CHECK(numeric_rank(profile_jacobian(chart, e.r)) == 2);
    }
  }
}

TEST_CASE("evaluation reports domain issues without throwing") {
  auto inst = stock_instance(Family::E0E);
  inst.functions["p"] = ProfileFunction::polynomial({0.1, -1.0});
  const auto e = evaluate(inst, 1.0, {0, 0, 0});
  CHECK_FALSE(e.in_domain);
  CHECK(e.issue != DomainIssue::none);
  CHECK(e0e_min_density(inst, -1, 1) == doctest::Approx(-1.0));
  CHECK(e0e_min_density(stock_instance(Family::E0E), -1, 1) == doctest::Approx(1.0));

  const auto sn = stock_instance(Family::E0Aplus);
  const double t0 = linearized_catastrophe_time(sn);
  std::size_t out = 0;
  for (const auto& x : blowup_scan_line(sn, 61, 3.0))
    if (!evaluate(sn, 3.0 * t0, x).in_domain) ++out;
  CHECK(out > 0);
}

TEST_CASE("implicit branch is stable under step halving") {
  const auto inst = stock_instance(Family::E0Aplus);
  EvaluateOptions fine;
  fine.continuation_step = 0.025;
  for (const Vec3& x : {Vec3{0.1, 0.2, -0.1}, Vec3{-0.3, 0.0, 0.25}}) {
    for (double t : {0.1, 0.3, 0.5}) {
      const auto a = evaluate(inst, t, x), b = evaluate(inst, t, x, fine);
      REQUIRE((a.in_domain && b.in_domain));
      CHECK(std::abs(a.r[1] - b.r[1]) <= 1e-8);
    }
  }
}

TEST_CASE("profile functions") {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> R(-2, 2);
  const std::vector<ProfileFunction> fs{ProfileFunction::polynomial({1, -2, 0.5, 0.25}),
                                        ProfileFunction::sine(0.7, 1.3, 0.2, 0.1),
                                        ProfileFunction::exponential(0.5, -0.8, 1.0),
                                        ProfileFunction::jacobi(ProfileKind::jacobi_sn, 0.5, 1.2, 0.9, 0.1, 0.0),
                                        ProfileFunction::jacobi(ProfileKind::jacobi_cn, 0.3),
                                        ProfileFunction::jacobi(ProfileKind::jacobi_dn, 0.8, 1.0, 1.5),
                                        ProfileFunction::affine(0.3, -1.2)};
  for (const auto& f : fs) {
    CHECK_NOTHROW(f.validate());
    for (int n = 0; n < 50; ++n) {
      const double r = R(rng), h = 1e-4;
      CHECK(f.d1(r) == doctest::Approx((f.value(r + h) - f.value(r - h)) / (2 * h)).epsilon(1e-6));
      CHECK(f.d2(r) == doctest::Approx((f.d1(r + h) - f.d1(r - h)) / (2 * h)).epsilon(1e-6));
    }
  }
  CHECK(ProfileFunction::affine(0.3, -1.2).value(2.0) == doctest::Approx(0.3 - 2.4));
  ProfileFunction bad = ProfileFunction::sine(1, 1);
  bad.coefficients.pop_back();
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(ProfileFunction::jacobi(ProfileKind::jacobi_sn, 1.5).validate(), ConfigError);
  CHECK_THROWS_AS(profile_kind_from_string("cosine"), ConfigError);
  CHECK(profile_kind_from_string("jacobi_dn") == ProfileKind::jacobi_dn);
  auto w = ProfileFunction::sine(1, 1);
  w.weights = {2.0, -1.0};
  CHECK(w.value2(0.5, 0.25) == doctest::Approx(std::sin(0.75)));
  CHECK(w.grad2(0.5, 0.25)[1] == doctest::Approx(-std::cos(0.75)));
}

TEST_CASE("Halton sampling") {
  CHECK(radical_inverse(1, 2) == 0.5);
  CHECK(radical_inverse(3, 2) == 0.75);
  CHECK(radical_inverse(5, 3) == doctest::Approx(7.0 / 9.0));
  SampleSpec s{{0, -1, 2, 0}, {1, 1, 3, 0.5}, 64, 99};
  const auto a = halton_points(s), b = halton_points(s);
  REQUIRE(a.size() == 64);
  CHECK(a == b);
  for (const auto& p : a)
    for (int i = 0; i < 4; ++i) {
      CHECK(p[i] >= s.lo[i]);
      CHECK(p[i] <= s.hi[i]);
    }
  s.seed = 100;
  CHECK(halton_points(s) != a);
}
