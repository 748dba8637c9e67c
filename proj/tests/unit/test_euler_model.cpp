#include <doctest.h>

#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "rinv/euler_model.hpp"

using namespace rinv;

namespace {

FluidState random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> V(-2.0, 2.0), P(0.2, 3.0);
  return {{V(rng), V(rng), V(rng)}, P(rng), P(rng)};
}

Vec3 random_vec(std::mt19937_64& rng, double s = 1.0) {
  std::uniform_real_distribution<double> U(-s, s);
  return {U(rng), U(rng), U(rng)};
}

}  // namespace

TEST_CASE("A0 structure and unit determinant") {
  std::mt19937_64 rng(31);
  const ExternalParams params{{0, 0, -1}, {0, 0, 1}, 1.4};
  for (int n = 0; n < 100; ++n) {
    const auto u = random_state(rng);
    const auto a0 = assemble_matrix(0, u, params);
    for (std::size_t r = 0; r < 5; ++r)
      for (std::size_t c = 0; c < 5; ++c) {
        const double expect = r == c ? 1.0 : (r == 4 && c == 3 ? -params.kappa * u.p / u.rho : 0.0);
        CHECK(a0(r, c) == doctest::Approx(expect).epsilon(1e-15));
      }
    CHECK(determinant(a0) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(assemble_matrix(4, FluidState{}, params), DomainError);
  CHECK_THROWS_AS(assemble_matrix(-1, FluidState{}, params), DomainError);
}

TEST_CASE("A1 at rest") {
  const FluidState u{{0, 0, 0}, 1.0, 2.0};
  const auto a1 = assemble_matrix(1, u, ExternalParams{});
  for (std::size_t d = 0; d < 5; ++d) CHECK(a1(d, d) == 0.0);
  CHECK(a1(4, 3) == 0.0);
  CHECK(a1(0, 4) == 1.0);
  CHECK(a1(3, 0) == 1.0);
}

TEST_CASE("A2 and A3 differ only in the axis columns and v_i diagonals") {
  const FluidState u{{0.3, -0.7, 1.1}, 1.3, 0.8};
  const ExternalParams params{};
  const auto a2 = assemble_matrix(2, u, params), a3 = assemble_matrix(3, u, params);
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 5; ++c) {
      const bool touched = r == c || (r == 1 && c == 4) || (r == 2 && c == 4) || (r == 3 && (c == 1 || c == 2)) ||
                           (r == 4 && c == 3);
      if (!touched) CHECK(a2(r, c) == a3(r, c));
    }
  CHECK(a2(1, 1) == doctest::Approx(-0.7));
  CHECK(a3(2, 2) == doctest::Approx(1.1));
}

TEST_CASE("source term") {
  const ExternalParams p{{0.1, 0.2, -9.8}, {0.0, 0.3, 1.0}, 1.4};
  const auto b0 = source_B(FluidState{{0, 0, 0}, 1, 1}, p);
  CHECK(b0[0] == 0.1);
  CHECK(b0[1] == 0.2);
  CHECK(b0[2] == -9.8);
  CHECK(b0[3] == 0.0);
  CHECK(b0[4] == 0.0);
  const auto bz = source_B(FluidState{{0, 0, 0}, 1, 1}, ExternalParams{});
  for (double c : bz) CHECK(c == 0.0);

  std::mt19937_64 rng(32);
  for (int n = 0; n < 200; ++n) {
    const Vec3 v = random_vec(rng), om = random_vec(rng), g = random_vec(rng);
    const auto b = source_B(FluidState{v, 1, 1}, ExternalParams{g, om, 1.4});
    // Hand expansion of g - Omega x v.
    CHECK(b[0] == doctest::Approx(g[0] - om[1] * v[2] + om[2] * v[1]));
    CHECK(b[1] == doctest::Approx(g[1] - om[2] * v[0] + om[0] * v[2]));
    CHECK(b[2] == doctest::Approx(g[2] - om[0] * v[1] + om[1] * v[0]));
    CHECK(b[3] == 0.0);
    CHECK(b[4] == 0.0);
  }
}

TEST_CASE("dispersion value closed forms") {
  const FluidState u{{0.5, -0.2, 0.1}, 1.2, 0.9};
  const ExternalParams p{};
  CHECK(dispersion_value({1.0, {0, 0, 0}, WaveFamily::Hydrodynamic}, u, p) == 1.0);
  const auto ent = make_wave_vector(WaveFamily::Entropic, {1, 2, 3}, u, p);
  CHECK(dispersion_value(ent, u, p) == doctest::Approx(0.0));
  for (auto f : {WaveFamily::AcousticPlus, WaveFamily::AcousticMinus}) {
    const auto ac = make_wave_vector(f, {1, 2, 3}, u, p);
    CHECK(std::abs(dispersion_value(ac, u, p)) <= 1e-12 * characteristic_scale(ac, u, p));
  }
}

TEST_CASE("characteristic determinant equals the dispersion polynomial") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> L(-3.0, 3.0);
  const ExternalParams p{{0, 0, -1}, {0.1, 0.2, 0.7}, 1.4};
  for (int n = 0; n < 300; ++n) {
    const auto u = random_state(rng);
    const WaveVector wv{L(rng), random_vec(rng, 2.0), WaveFamily::Hydrodynamic};
    const double scale = characteristic_scale(wv, u, p);
    CHECK(std::abs(characteristic_det(wv, u, p) - dispersion_value(wv, u, p)) <= 1e-12 * scale);
  }
}

TEST_CASE("the printed advective continuity row has only the entropic root") {
  const FluidState u{{0.3, 0.1, -0.4}, 1.1, 0.7};
  const ExternalParams p{};
  const WaveVector wv{0.9, {0.2, -1.0, 0.5}, WaveFamily::Hydrodynamic};
  const double w = wv.lambda0 + dot(u.v, wv.lambda);
  CHECK(characteristic_det(wv, u, p, ContinuityRow::advective) == doctest::Approx(std::pow(w, 5)).epsilon(1e-12));
}

TEST_CASE("wave vector constructors") {
  const ExternalParams p{{0.1, 0.2, 0.3}, {0, 0, 1}, 4.0};
  auto e = make_wave_vector(WaveFamily::Entropic, {1, 0, 0}, FluidState{{2, 0, 0}, 1, 1}, p);
  CHECK(e.lambda0 == -2.0);
  CHECK(e.lambda == Vec3{1, 0, 0});
  // kappa p / rho = 4
  auto a = make_wave_vector(WaveFamily::AcousticPlus, {1, 0, 0}, FluidState{{0, 0, 0}, 1, 1}, p);
  CHECK(a.lambda0 == doctest::Approx(2.0));
  auto am = make_wave_vector(WaveFamily::AcousticMinus, {1, 0, 0}, FluidState{{0, 0, 0}, 1, 1}, p);
  CHECK(am.lambda0 == doctest::Approx(-2.0));
  auto ie = make_wave_vector(WaveFamily::InhomEntropic, {9, 9, 9}, FluidState{{0, 0, 0}, 1, 1}, p);
  CHECK(ie.lambda0 == 0.0);
  CHECK(ie.lambda == Vec3{0.1, 0.2, 0.3});
  auto ia = make_wave_vector(WaveFamily::InhomAcoustic, {0, 3, 4}, FluidState{{0, 0, 0}, 1, 1}, p, -1);
  CHECK(ia.lambda0 == doctest::Approx(-10.0));

  CHECK_THROWS_AS(make_wave_vector(WaveFamily::Entropic, {0, 0, 0}, FluidState{}, p), DomainError);
  CHECK_THROWS_AS(make_wave_vector(WaveFamily::InhomAcoustic, {1, 0, 0}, FluidState{}, p, 0), DomainError);
  CHECK_THROWS_AS(make_wave_vector(WaveFamily::Hydrodynamic, {1, 0, 0}, FluidState{}, p), DomainError);
  // lambda0 + v.lambda = 0 and = c |lambda| both excluded.
  CHECK_THROWS_AS(make_wave_vector(WaveFamily::Hydrodynamic, {1, 0, 0}, FluidState{{0, 0, 0}, 1, 1}, p, 1, 0.0),
                  DomainError);
  CHECK_THROWS_AS(make_wave_vector(WaveFamily::Hydrodynamic, {1, 0, 0}, FluidState{{0, 0, 0}, 1, 1}, p, 1, 2.0),
                  DomainError);
  auto h = make_wave_vector(WaveFamily::Hydrodynamic, {1, 0, 0}, FluidState{{0, 0, 0}, 1, 1}, p, 1, 0.7);
  CHECK(std::abs(characteristic_det(h, FluidState{{0, 0, 0}, 1, 1}, p)) > 1e-3);
}

TEST_CASE("inhomogeneous rank condition") {
  SUBCASE("zero source") {
    std::mt19937_64 rng(34);
    const ExternalParams p{{0, 0, 0}, {0.3, 0.1, 0.2}, 1.4};
    const FluidState u{{0, 0, 0}, 1.3, 0.9};
    for (int n = 0; n < 50; ++n) {
      std::uniform_real_distribution<double> L(-2, 2);
      CHECK(inhom_rank_condition({L(rng), random_vec(rng), WaveFamily::Hydrodynamic}, u, p));
    }
  }
  SUBCASE("full-rank pencil") {
    const ExternalParams p{{1, 2, 3}, {0, 0, 1}, 1.4};
    CHECK(inhom_rank_condition({1.0, {0, 0, 0}, WaveFamily::Hydrodynamic}, FluidState{{0.1, 0.2, 0.3}, 1, 1}, p));
  }
  SUBCASE("inhomogeneous entropic vector against exact rational elimination") {
    using Q = oracle::Rational;
    // Dyadic data so every pencil entry is an exact rational.
    const std::vector<std::array<long long, 3>> vs{{1, -2, 3}, {2, 1, 0}, {-3, 1, 1}, {0, 2, -1}};
    const std::vector<std::array<long long, 3>> gs_om{{1, 0, -1}, {2, 1, 0}, {0, 1, 1}};
    for (const auto& vi : vs) {
      for (const auto& gi : gs_om) {
        // Omega = (gi[1], -gi[0], 0) / 2 is orthogonal to g = gi / 4... use g = (gi), Omega = perp.
        const std::array<Q, 3> g{Q(gi[0], 4), Q(gi[1], 4), Q(gi[2], 4)};
        const std::array<Q, 3> om{Q(gi[1], 2), Q(-gi[0], 2), Q(0)};
        const std::array<Q, 3> v{Q(vi[0], 8), Q(vi[1], 8), Q(vi[2], 8)};
        const Q rho(5, 4), pr(3, 2), kappa(7, 5);
        const Q kp = kappa * pr / rho;
        const std::array<Q, 3> oxv{om[1] * v[2] - om[2] * v[1], om[2] * v[0] - om[0] * v[2],
                                   om[0] * v[1] - om[1] * v[0]};
        std::array<Q, 3> lam{};
        for (int i = 0; i < 3; ++i) lam[i] = g[i] - oxv[i];
        const Q l0 = -(v[0] * g[0] + v[1] * g[1] + v[2] * g[2]);
        const Q w = l0 + v[0] * lam[0] + v[1] * lam[1] + v[2] * lam[2];
        std::vector<std::vector<Q>> pencil(5, std::vector<Q>(5, Q(0)));
        for (int d = 0; d < 5; ++d) pencil[d][d] = w;
        for (int i = 0; i < 3; ++i) {
          pencil[i][4] = lam[i] / rho;
          pencil[3][i] = rho * lam[i];
        }
        pencil[4][3] = -kp * w;
        auto aug = pencil;
        for (int r = 0; r < 5; ++r) aug[r].push_back(r < 3 ? g[r] - oxv[r] : Q(0));
        const bool exact = oracle::rational_rank(aug) == oracle::rational_rank(pencil);

        auto d = [](const Q& q) { return boost::rational_cast<double>(q); };
        const ExternalParams p{{d(g[0]), d(g[1]), d(g[2])}, {d(om[0]), d(om[1]), d(om[2])}, d(kappa)};
        const FluidState u{{d(v[0]), d(v[1]), d(v[2])}, d(rho), d(pr)};
        const auto wv = make_wave_vector(WaveFamily::InhomEntropic, {0, 0, 0}, u, p);
        CHECK(inhom_rank_condition(wv, u, p) == exact);
        CHECK(exact);
      }
    }
  }
}

TEST_CASE("entropic root has multiplicity three") {
  std::mt19937_64 rng(35);
  const ExternalParams p{{0.2, 0, -1}, {0, 0.4, 0.8}, 1.4};
  for (int n = 0; n < 200; ++n) {
    const auto u = random_state(rng);
    const auto wv = make_wave_vector(WaveFamily::Entropic, random_vec(rng, 2.0), u, p);
    const double scale = characteristic_scale(wv, u, p);
    const double h = 1e-3 * (1.0 + std::abs(wv.lambda0));
    auto det_at = [&](double l0) { return characteristic_det({l0, wv.lambda, wv.family}, u, p); };
    const double f0 = det_at(wv.lambda0), fp = det_at(wv.lambda0 + h), fm = det_at(wv.lambda0 - h);
    CHECK(std::abs(f0) <= 1e-10 * scale);
    CHECK(std::abs((fp - fm) / (2 * h)) <= 1e-6 * scale);
    CHECK(std::abs((fp - 2 * f0 + fm) / (h * h)) <= 1e-6 * scale);
  }
}

TEST_CASE("superposition table") {
  CHECK(superposition_admissible(InhomTag::E0, HomTag::E));
  CHECK(superposition_admissible(InhomTag::E0, HomTag::Aeps));
  CHECK(superposition_admissible(InhomTag::A0eps, HomTag::E));
  CHECK_FALSE(superposition_admissible(InhomTag::A0eps, HomTag::Aeps));
  CHECK(superposition_admissible(InhomTag::H0, HomTag::E));
  CHECK(superposition_admissible(InhomTag::H0, HomTag::Aeps));
  CHECK_FALSE(superposition_admissible("A0e", "Ae"));
  CHECK(superposition_admissible("H0", "Aeps"));
  CHECK_THROWS_AS(superposition_admissible("X0", "E"), DomainError);
  CHECK_THROWS_AS(superposition_admissible("E0", "Q"), DomainError);
}

TEST_CASE("external parameters") {
  CHECK(ExternalParams{{0, 0, 0}, {0, 0, 0}, 2.0}.gamma() == 2.0);
  CHECK_THROWS_AS((ExternalParams{{0, 0, 0}, {0, 0, 0}, 0.0}.validate()), DomainError);
  CHECK_THROWS_AS((ExternalParams{{std::nan(""), 0, 0}, {0, 0, 0}, 1.0}.validate()), DomainError);
  CHECK(FluidState{{0, 0, 0}, 1, 1}.physical());
  CHECK_FALSE(FluidState{{0, 0, 0}, -1, 1}.physical());
}
