#include <doctest.h>

#include <cmath>

#include "rinv/fvm_oracle.hpp"

using namespace rinv;

namespace {

GridField uniform(const GridSpec& g, const FluidState& u) {
  GridField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f.set(i, u);
  return f;
}

SolutionInstance oracle_instance() {
  auto inst = stock_instance(Family::E0E);
  inst.params.c0 = 0.1;
  inst.params.lambda1 = {1.0, -1.0, -0.5};
  return inst;
}

}  // namespace

TEST_CASE("grid geometry") {
  GridSpec g{{4, 5, 6}, {0, -1, 2}, {1, 1, 5}};
  CHECK(g.size() == 120);
  CHECK(g.spacing(1) == doctest::Approx(0.4));
  const Vec3 x = g.node(1, 2, 3);
  CHECK(x[0] == doctest::Approx(0.25));
  CHECK(x[1] == doctest::Approx(-0.2));
  CHECK(x[2] == doctest::Approx(3.5));
  CHECK(g.index(1, 0, 0) == 30);
}

TEST_CASE("steady states are preserved") {
  const GridSpec g{{6, 6, 6}, {0, 0, 0}, {1, 1, 1}};
  SUBCASE("no forcing") {
    const FluidState u{{0.2, -0.1, 0.3}, 1.1, 0.9};
    const ExternalParams p{{0, 0, 0}, {0, 0, 0}, 1.4};
    const auto out = integrate(uniform(g, u), p, 1e-3, 20);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto s = out.at(i).as_array(), e = u.as_array();
      for (int c = 0; c < 5; ++c) CHECK(s[c] == e[c]);
    }
    CHECK(out.t == doctest::Approx(0.02));
  }
  SUBCASE("gravity balanced by the Coriolis term") {
    const FluidState u{{0.5, 0.25, 0.0}, 1.0, 1.0};
    const Vec3 om{0, 0, 2};
    const ExternalParams p{cross(om, u.v), om, 1.4};
    const auto out = integrate(uniform(g, u), p, 1e-3, 20);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto s = out.at(i).as_array(), e = u.as_array();
      for (int c = 0; c < 5; ++c) CHECK(std::abs(s[c] - e[c]) <= 1e-15);
    }
  }
}

TEST_CASE("integration guards") {
  const GridSpec g{{6, 6, 6}, {0, 0, 0}, {1, 1, 1}};
  const auto f = uniform(g, FluidState{{0, 0, 0}, 1, 1});
  const ExternalParams p{{0, 0, 0}, {0, 0, 0}, 1.0};
  // h = 1/6, speed = 1: the bound is 0.25 / 6.
  CHECK_THROWS_AS(integrate(f, p, 0.05, 1), IntegrationError);
  CHECK_NOTHROW(integrate(f, p, 0.04, 1));
  CHECK_THROWS_AS(integrate(uniform(GridSpec{{4, 6, 6}, {0, 0, 0}, {1, 1, 1}}, FluidState{}), p, 1e-3, 1),
                  DomainError);
  auto bad = f;
  bad.q[3][7] = -1.0;
  try {
    integrate(bad, p, 1e-3, 1);
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(e.step() == 0);
  }
  CHECK(max_wave_speed(uniform(g, FluidState{{3, 4, 0}, 1, 4}), p) == doctest::Approx(7.0));
}

TEST_CASE("comparison against the exact solution") {
  const auto inst = oracle_instance();
  REQUIRE(validate(inst).empty());
  const double pi = 3.14159265358979323846;
  const GridSpec g{{8, 8, 8}, {-pi, -pi, -pi}, {pi, pi, pi}};
  const auto f0 = sample_exact(inst, g, 0.0);
  const auto e0 = compare(inst, f0, 2);
  CHECK(e0.max_linf() == 0.0);
  CHECK(e0.nodes == 64);
  CHECK(compare_box(inst, f0, {-1, -1, -1}, {1, 1, 1}).max_linf() == 0.0);
  CHECK_THROWS_AS(compare(inst, f0, 4), DomainError);
  CHECK_THROWS_AS(compare_box(inst, f0, {5, 5, 5}, {6, 6, 6}), DomainError);
  CHECK(minimum_margin(0.01, 10, 2.0, 0.05) == 4);
}

TEST_CASE("refinement study") {
  const auto inst = oracle_instance();
  const double pi = 3.14159265358979323846;
  const double t_end = 0.02;
  std::array<double, 2> err{};
  for (int level = 0; level < 2; ++level) {
    const std::size_t n = level == 0 ? 16 : 32;
    const GridSpec g{{n, n, n}, {-pi, -pi, -pi}, {pi, pi, pi}};
    const auto f0 = sample_exact(inst, g, 0.0);
    const std::size_t steps = 8;
    const auto out = integrate(f0, inst.external, t_end / steps, steps);
    err[level] = compare_box(inst, out, {-pi / 2, -pi / 2, -pi / 2}, {pi / 2, pi / 2, pi / 2}).max_linf();
  }
  CHECK(err[0] / err[1] >= 3.2);
  CHECK(err[0] / err[1] <= 4.8);
}
