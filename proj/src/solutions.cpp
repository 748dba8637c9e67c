#include "rinv/solutions.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "rinv/errors.hpp"
#include "rinv/quadrature.hpp"
#include "rinv/root_find.hpp"
#include "rinv/specfun.hpp"

namespace rinv {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::E0E: return "E0E";
    case Family::E0Aplus: return "E0Aplus";
    case Family::A0eE: return "A0eE";
    case Family::H0E: return "H0E";
  }
  return "?";
}

Family family_from_string(std::string_view name) {
  for (Family f : {Family::E0E, Family::E0Aplus, Family::A0eE, Family::H0E})
    if (to_string(f) == name) return f;
  throw ConfigError("unknown solution family '" + std::string(name) + "' (expected E0E, E0Aplus, A0eE or H0E)");
}

std::string_view to_string(DomainIssue d) {
  switch (d) {
    case DomainIssue::none: return "none";
    case DomainIssue::root_not_bracketed: return "root not bracketed";
    case DomainIssue::no_convergence: return "no convergence";
    case DomainIssue::lambert_branch: return "lambert argument below branch point";
    case DomainIssue::nonpositive_density: return "rho <= 0";
    case DomainIssue::nonpositive_pressure: return "p <= 0";
    case DomainIssue::singular_denominator: return "singular denominator";
    case DomainIssue::catastrophe: return "gradient catastrophe";
    case DomainIssue::non_finite: return "non-finite state";
  }
  return "?";
}

const ProfileFunction& SolutionInstance::fn(const std::string& slot) const {
  auto it = functions.find(slot);
  if (it == functions.end())
    throw ConfigError(std::string(to_string(family)) + ": missing function slot '" + slot + "'");
  return it->second;
}

std::vector<std::string> required_slots(Family f) {
  switch (f) {
    case Family::E0E: return {"p", "v3"};
    case Family::E0Aplus: return {"B"};
    case Family::A0eE: return {"F1", "F2"};
    case Family::H0E: return {"F1", "F2", "rho"};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Validation

std::vector<Violation> validate(const SolutionInstance& inst) {
  std::vector<Violation> out;
  constexpr double tol = kConstraintTolerance;
  const auto& P = inst.params;
  const Vec3& g = inst.external.g;
  const Vec3& om = inst.external.omega;
  auto require = [&](bool ok, const char* name, double value) {
    if (!ok) out.push_back({name, "value " + std::to_string(value)});
  };

  if (!(inst.external.kappa > 0.0)) out.push_back({"kappa > 0", "value " + std::to_string(inst.external.kappa)});
  for (const auto& slot : required_slots(inst.family)) {
    auto it = inst.functions.find(slot);
    if (it == inst.functions.end()) {
      out.push_back({"function slot '" + slot + "'", "missing"});
      continue;
    }
    try {
      it->second.validate();
    } catch (const ConfigError& e) {
      out.push_back({"function slot '" + slot + "'", e.what()});
    }
  }
  for (const auto& [name, f] : inst.functions) {
    const auto req = required_slots(inst.family);
    if (std::find(req.begin(), req.end(), name) == req.end())
      out.push_back({"function slot '" + name + "'", "not used by family " + std::string(to_string(inst.family))});
  }

  const double g_dot_om = dot(g, om);
  switch (inst.family) {
    case Family::E0E: {
      require(std::abs(g_dot_om) <= tol, "g.Omega = 0", g_dot_om);
      require(std::abs(om[2]) > tol, "Omega3 != 0", om[2]);
      require(std::abs(g[0]) > tol, "g1 != 0", g[0]);
      require(std::abs(g[2]) > tol, "g3 != 0", g[2]);
      const double l_om = dot(P.lambda1, om);
      require(std::abs(l_om) <= tol, "lambda1.Omega = 0", l_om);
      require(norm(P.lambda1) > tol, "lambda1 != 0", norm(P.lambda1));
      break;
    }
    case Family::E0Aplus: {
      require(std::abs(inst.external.kappa - 1.0) <= tol, "kappa must equal 1", inst.external.kappa);
      require(std::abs(g_dot_om) <= tol, "g.Omega = 0", g_dot_om);
      const double cr = norm(cross(P.lambda1, om));
      require(cr <= tol, "lambda1 x Omega = 0", cr);
      require(norm(P.lambda1) > tol, "lambda1 != 0", norm(P.lambda1));
      require(P.A > 0.0, "A > 0", P.A);
      require(std::abs(om[0] * om[2]) > tol, "Omega1*Omega3 != 0", om[0] * om[2]);
      break;
    }
    case Family::A0eE: {
      require(std::abs(norm(om) - 1.0) <= tol, "|Omega| = 1", norm(om));
      require(std::abs(g_dot_om) <= tol, "g.Omega = 0", g_dot_om);
      require(P.eps == 1 || P.eps == -1, "eps = +/-1", P.eps);
      require(P.eps1 == 1 || P.eps1 == -1, "eps1 = +/-1", P.eps1);
      if (P.lambda0) {
        const Vec3 want = (P.eps1 * norm(*P.lambda0)) * om;
        const double gap = norm(*P.lambda0 - want);
        require(gap <= tol, "lambda0 = eps1|lambda0|Omega", gap);
        require(std::abs(norm(*P.lambda0) - 1.0) <= tol, "|lambda0| = 1", norm(*P.lambda0));
      }
      require(P.p0 > 0.0, "p0 > 0", P.p0);
      require(P.rho0 > 0.0, "rho0 > 0", P.rho0);
      require(std::abs(om[2]) > tol, "Omega3 != 0", om[2]);
      require(om[1] * om[1] + om[2] * om[2] > tol, "Omega2^2+Omega3^2 != 0", om[1] * om[1] + om[2] * om[2]);
      break;
    }
    case Family::H0E: {
      const double off = norm(om - Vec3{0.0, 0.0, 1.0});
      require(off <= tol, "Omega = (0,0,1)", off);
      const double cc = P.c1 * P.c1 + P.c2 * P.c2;
      require(std::abs(cc - 1.0) <= tol, "c1²+c2² = 1", cc);
      require(std::abs(P.c2) > tol, "c2 != 0", P.c2);
      const double k = P.c0 + P.c1 * g[1] - P.c2 * g[0];
      require(std::abs(k) > tol, "c0+c1g2-c2g1 != 0", k);
      require(P.p0 > 0.0, "p0 > 0", P.p0);
      break;
    }
  }
  return out;
}

void require_valid(const SolutionInstance& inst) {
  const auto v = validate(inst);
  if (v.empty()) return;
  std::string msg = std::string(to_string(inst.family)) + " instance violates:";
  for (const auto& x : v) msg += "\n  " + x.constraint + " (" + x.detail + ")";
  throw ConfigError(msg);
}

double e0e_min_density(const SolutionInstance& inst, double r_lo, double r_hi, std::size_t n) {
  const auto& p = inst.fn("p");
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = n == 1 ? r_lo : r_lo + (r_hi - r_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    m = std::min(m, p.d1(r));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Family formulas

namespace {

/// Signals an out-of-domain condition from deep inside a formula.
struct DomainSignal {
  DomainIssue issue;
};

struct E0EConst {
  double v1_0, v2_0, k1, k2;  // v1 = v1_0 + k1 v3, v2 = v2_0 + k2 v3
  Covector l0, l1;
  explicit E0EConst(const SolutionInstance& inst) {
    const auto& g = inst.external.g;
    const auto& om = inst.external.omega;
    const double c0 = inst.params.c0;
    const Vec3& l = inst.params.lambda1;
    v1_0 = g[1] / om[2] - c0 / g[0] - c0 * om[1] * g[1] / (g[0] * g[2] * om[2]);
    v2_0 = c0 * om[1] / (g[2] * om[2]) - g[0] / om[2];
    k1 = om[0] / om[2];
    k2 = om[1] / om[2];
    l0 = {c0, c0 * om[1] / g[2], -c0 * om[0] / g[2], 0.0};
    l1 = {(l[1] * g[0] - l[0] * g[1]) / om[2] + c0 * l[2] / g[2], l[0], l[1], l[2]};
  }
};

struct E0AConst {
  double alpha, K, sqrtA, nO;
  Covector l0;
  explicit E0AConst(const SolutionInstance& inst) {
    const auto& g = inst.external.g;
    const auto& om = inst.external.omega;
    const auto& P = inst.params;
    const Vec3& l = P.lambda1;
    sqrtA = std::sqrt(P.A);
    nO = norm(om);
    alpha = sqrtA / nO * dot(l, om);
    K = -l[0] * P.C1 + sqrtA * norm(l) +
        (l[1] * om[0] * (g[0] - P.c1) - (l[1] * om[1] + l[2] * om[2]) * (P.c2 - g[1] + P.C1 * om[2])) /
            (om[0] * om[2]);
    l0 = {(P.c2 * g[0] - P.c1 * g[1]) / om[2], P.c1, P.c2, -(P.c1 * om[0] + P.c2 * om[1]) / om[2]};
  }
};

struct A0EConst {
  double c, omega, a, b, d, c1;
  explicit A0EConst(const SolutionInstance& inst) {
    const auto& g = inst.external.g;
    const auto& om = inst.external.omega;
    const auto& P = inst.params;
    const double kappa = inst.external.kappa;
    const double eps = P.eps, eps1 = P.eps1;
    c = std::sqrt(P.p0 * kappa / P.rho0);
    omega = eps * std::sqrt(P.rho0 / (kappa * P.p0));
    const double q = om[1] * om[1] + om[2] * om[2];
    a = om[0] * om[1] / q;
    b = eps1 * om[2] / (eps * q);
    d = (eps * om[1] * c - P.c0 * om[1] - eps1 * g[0] * om[1] * om[2]) / (eps1 * q);
    c1 = (eps1 * (g[1] * om[2] * om[2] + om[1] * om[1] * (g[1] + g[0] * om[0])) - P.c0 * om[0] * om[2] +
          eps * om[0] * om[2] * c) /
         (eps1 * om[2]);
  }
};

struct H0EConst {
  double K;  // c2 (c0 + c1 g2 - c2 g1)
  explicit H0EConst(const SolutionInstance& inst) {
    const auto& g = inst.external.g;
    const auto& P = inst.params;
    K = P.c2 * (P.c0 + P.c1 * g[1] - P.c2 * g[0]);
  }
};

struct H0EVelocity {
  double v1, v2, W, E, s;
};

H0EVelocity h0e_velocity(const SolutionInstance& inst, const H0EConst& hc, double r0, double r1) {
  const auto& g = inst.external.g;
  const auto& P = inst.params;
  const double s = (P.c1 * (r0 + inst.fn("F1").value(r1)) - g[0]) / hc.K;
  const double phi = std::exp(s) / hc.K;
  if (!std::isfinite(phi)) throw DomainSignal{DomainIssue::non_finite};
  if (phi < kLambertBranchPoint) throw DomainSignal{DomainIssue::lambert_branch};
  const double W = lambert_w0(phi);
  const double E = std::exp(-W);
  return {g[1] + P.c1 / P.c2 * std::exp(-W + s), E - g[0], W, E, s};
}

// d exp(-W(phi(r0, r1))) / dr1
double h0e_dE_dr1(const SolutionInstance& inst, const H0EConst& hc, const H0EVelocity& hv, double r1) {
  const double ds = inst.params.c1 * inst.fn("F1").d1(r1) / hc.K;
  return -hv.E * hv.W / (1.0 + hv.W) * ds;
}

double h0e_v3_integral(const SolutionInstance& inst, const H0EConst& hc, double r0, double r1) {
  const auto& P = inst.params;
  const double g3 = inst.external.g[2];
  auto integrand = [&](double q) {
    const auto hv = h0e_velocity(inst, hc, q, r1);
    const double den = P.c0 + P.c1 * hv.v1 + P.c2 * hv.v2;
    if (std::abs(den) < 1e-12) throw DomainSignal{DomainIssue::singular_denominator};
    return g3 / den;
  };
  // Tight tolerance: the residual gate differences this integral at h ~ 1e-5.
  return integrate_gk15(integrand, 0.0, r0, 1e-12, 10).value;
}

FluidState state_e0e(const SolutionInstance& inst, const E0EConst& ec, double r0, double r1) {
  const double v3 = inst.fn("v3").value2(r0, r1);
  const auto& p = inst.fn("p");
  return {{ec.v1_0 + ec.k1 * v3, ec.v2_0 + ec.k2 * v3, v3}, p.d1(r0), p.value(r0)};
}

FluidState state_e0a(const SolutionInstance& inst, const E0AConst& ac, double r0, double r1) {
  const auto& om = inst.external.omega;
  const auto& P = inst.params;
  const auto& g = inst.external.g;
  const double B = inst.fn("B").value(r1);
  const double v1 = P.C1 - ac.sqrtA / ac.nO * om[0] * B;
  const double v2 = (P.c1 * om[0] - g[0] * om[0] + om[1] * (P.c2 - g[1] + om[2] * v1)) / (om[0] * om[2]);
  const double v3 = (P.c2 - g[1] + om[2] * v1) / om[0];
  const double rho = std::exp(r0 / P.A + B);
  return {{v1, v2, v3}, rho, P.A * rho};
}

FluidState state_a0e(const SolutionInstance& inst, const A0EConst& k, double r0, double r1) {
  const auto& om = inst.external.omega;
  const auto& P = inst.params;
  const double F1 = inst.fn("F1").value(r1);
  const double F2 = inst.fn("F2").value(r1);
  const double ph = k.omega * r0;
  const double cc = F1 * std::cos(ph) + F2 * std::sin(ph);
  const double sc = F2 * std::cos(ph) - F1 * std::sin(ph);
  const double v1 = cc + k.c1;
  // "+ c1" sits inside the first parenthesis of v2 as typeset.
  const double v2 = -k.a * (cc + k.c1) + k.b * sc + k.d;
  const double v3 = (P.eps * k.c - P.eps1 * (om[0] * v1 + om[1] * v2) - P.c0) / (om[2] * P.eps1);
  return {{v1, v2, v3}, P.rho0, P.p0};
}

FluidState state_h0e(const SolutionInstance& inst, const H0EConst& hc, double r0, double r1) {
  const auto hv = h0e_velocity(inst, hc, r0, r1);
  const double v3 = h0e_v3_integral(inst, hc, r0, r1) + inst.fn("F2").value(r1);
  return {{hv.v1, hv.v2, v3}, inst.fn("rho").value(r1), inst.params.p0};
}

FluidState state_any(const SolutionInstance& inst, double r0, double r1) {
  switch (inst.family) {
    case Family::E0E: return state_e0e(inst, E0EConst(inst), r0, r1);
    case Family::E0Aplus: return state_e0a(inst, E0AConst(inst), r0, r1);
    case Family::A0eE: return state_a0e(inst, A0EConst(inst), r0, r1);
    case Family::H0E: return state_h0e(inst, H0EConst(inst), r0, r1);
  }
  return {};
}

struct SolvedInvariants {
  std::array<double, 2> r{};
  int iters = 0;
};

DomainIssue classify(const RootFindError& e) {
  return std::string_view(e.what()).find("bracketed") != std::string_view::npos ? DomainIssue::root_not_bracketed
                                                                                : DomainIssue::no_convergence;
}

// Continuation in t from the explicit value of r1 at t = 0.
template <class G, class GP>
SolvedInvariants continue_in_t(double t, double r1_at_t0, double step, int expansions, G&& make_g, GP&& make_gp) {
  RootOptions ro;
  ro.max_expansions = expansions;
  SolvedInvariants out;
  const std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::abs(t) / step)));
  double r = r1_at_t0;
  double prev = r;
  for (std::size_t j = 1; j <= n; ++j) {
    const double tau = t * static_cast<double>(j) / static_cast<double>(n);
    const double w = std::max(0.05, 2.0 * std::abs(r - prev));
    auto g = make_g(tau);
    auto gp = make_gp(tau);
    // Secant predictor for the seed; the bracket stays centred on the last root.
    const double seed = r + (r - prev);
    const double lo = std::min(r, seed) - w, hi = std::max(r, seed) + w;
    const auto res = implicit_solve(g, gp, seed, {lo, hi}, ro);
    // g' is det M1 along the branch and starts at 1. A non-positive value at
    // the new root or between it and the previous one means the step crossed a
    // fold and the root found belongs to another sheet. Probing at the new time
    // can only misfire within one step of a genuine fold.
    constexpr int kProbes = 16;
    for (int q = kProbes; q >= 0; --q) {
      const double rq = r + (res.root - r) * static_cast<double>(q) / kProbes;
      if (!(gp(rq) > 0.0)) throw DomainSignal{DomainIssue::catastrophe};
    }
    prev = r;
    r = res.root;
    out.iters += res.iterations;
  }
  out.r[1] = r;
  return out;
}

SolvedInvariants solve_invariants(const SolutionInstance& inst, double t, const Vec3& x, double step, int expansions) {
  const auto& P = inst.params;
  switch (inst.family) {
    case Family::E0E: {
      const E0EConst ec(inst);
      return {{contract(ec.l0, t, x), contract(ec.l1, t, x)}, 0};
    }
    case Family::E0Aplus: {
      const E0AConst ac(inst);
      const auto& B = inst.fn("B");
      const double lx = dot(P.lambda1, x);
      auto out = continue_in_t(
          t, lx, step, expansions,
          [&](double tau) { return [&, tau](double r) { return r - (ac.alpha * B.value(r) + ac.K) * tau - lx; }; },
          [&](double tau) { return [&, tau](double r) { return 1.0 - ac.alpha * B.d1(r) * tau; }; });
      out.r[0] = contract(ac.l0, t, x);
      return out;
    }
    case Family::A0eE: {
      const A0EConst k(inst);
      const auto& om = inst.external.omega;
      return {{P.c0 * t + P.eps1 * dot(om, x), P.eps1 * (P.eps * k.c - P.c0) * t - dot(om, x)}, 0};
    }
    case Family::H0E: {
      const H0EConst hc(inst);
      const auto& g = inst.external.g;
      const double r0 = P.c0 * t + P.c1 * x[0] + P.c2 * x[1];
      const double sx = P.c1 * x[0] + P.c2 * x[1];
      const double base = P.c1 * g[1] - P.c2 * g[0];
      auto out = continue_in_t(
          t, sx, step, expansions,
          [&](double tau) {
            return [&, tau](double r) { return r + (base + h0e_velocity(inst, hc, r0, r).E) * tau - sx; };
          },
          [&](double tau) {
            return [&, tau](double r) {
              const auto hv = h0e_velocity(inst, hc, r0, r);
              return 1.0 + h0e_dE_dr1(inst, hc, hv, r) * tau;
            };
          });
      out.r[0] = r0;
      return out;
    }
  }
  return {};
}

std::array<SmallMatrix, 4> zero_eta() {
  std::array<SmallMatrix, 4> eta;
  for (auto& e : eta) e = SmallMatrix(2, 5);
  return eta;
}

}  // namespace

FluidState profile_state(const SolutionInstance& inst, double r0, double r1) {
  try {
    return state_any(inst, r0, r1);
  } catch (const DomainSignal& s) {
    throw DomainError("profile_state: " + std::string(to_string(s.issue)));
  }
}

// ---------------------------------------------------------------------------
// Charts

InvariantChart as_chart(const SolutionInstance& inst_in) {
  auto inst = std::make_shared<const SolutionInstance>(inst_in);
  InvariantChart chart;
  chart.params = inst->external;
  chart.profile = [inst](std::span<const double> r) { return profile_state(*inst, r[0], r[1]); };
  const auto& om = inst->external.omega;

  switch (inst->family) {
    case Family::E0E: {
      const E0EConst ec(*inst);
      const Vec3 l = inst->params.lambda1;
      chart.wave_vectors = {[l0 = ec.l0](const FluidState&) { return l0; },
                            [l](const FluidState& u) { return Covector{-dot(l, u.v), l[0], l[1], l[2]}; }};
      chart.eta = [l](const FluidState&) {
        auto eta = zero_eta();
        for (std::size_t a = 0; a < 3; ++a) eta[0](1, a) = -l[a];
        return eta;
      };
      chart.profile_jacobian = [inst, ec](std::span<const double> r) {
        SmallMatrix df(5, 2);
        const auto gv = inst->fn("v3").grad2(r[0], r[1]);
        const auto& p = inst->fn("p");
        for (std::size_t s = 0; s < 2; ++s) {
          df(0, s) = ec.k1 * gv[s];
          df(1, s) = ec.k2 * gv[s];
          df(2, s) = gv[s];
        }
        df(3, 0) = p.d2(r[0]);
        df(4, 0) = p.d1(r[0]);
        return df;
      };
      break;
    }
    case Family::E0Aplus: {
      const E0AConst ac(*inst);
      const Vec3 l = inst->params.lambda1;
      const double kappa = inst->external.kappa;
      chart.wave_vectors = {[l0 = ac.l0](const FluidState&) { return l0; },
                            [l, kappa](const FluidState& u) {
                              const double c = std::sqrt(kappa * u.p / u.rho);
                              return Covector{c * norm(l) - dot(l, u.v), l[0], l[1], l[2]};
                            }};
      chart.eta = [l, kappa](const FluidState& u) {
        auto eta = zero_eta();
        const double cl = std::sqrt(kappa * u.p / u.rho) * norm(l);
        for (std::size_t a = 0; a < 3; ++a) eta[0](1, a) = -l[a];
        eta[0](1, 3) = -cl / (2.0 * u.rho);
        eta[0](1, 4) = cl / (2.0 * u.p);
        return eta;
      };
      chart.profile_jacobian = [inst, ac, om](std::span<const double> r) {
        SmallMatrix df(5, 2);
        const auto& B = inst->fn("B");
        const double Bp = B.d1(r[1]);
        const double rho = std::exp(r[0] / inst->params.A + B.value(r[1]));
        for (std::size_t a = 0; a < 3; ++a) df(a, 1) = -ac.sqrtA / ac.nO * om[a] * Bp;
        df(3, 0) = rho / inst->params.A;
        df(3, 1) = rho * Bp;
        df(4, 0) = rho;
        df(4, 1) = inst->params.A * rho * Bp;
        return df;
      };
      break;
    }
    case Family::A0eE: {
      const A0EConst k(*inst);
      const double eps = inst->params.eps, eps1 = inst->params.eps1;
      const double kappa = inst->external.kappa;
      chart.wave_vectors = {[om, eps, eps1, kappa](const FluidState& u) {
                              const double c = std::sqrt(kappa * u.p / u.rho);
                              return Covector{eps * c - eps1 * dot(om, u.v), eps1 * om[0], eps1 * om[1],
                                              eps1 * om[2]};
                            },
                            [om](const FluidState& u) { return Covector{dot(om, u.v), -om[0], -om[1], -om[2]}; }};
      chart.eta = [om, eps, eps1, kappa](const FluidState& u) {
        auto eta = zero_eta();
        const double c = std::sqrt(kappa * u.p / u.rho);
        for (std::size_t a = 0; a < 3; ++a) {
          eta[0](0, a) = -eps1 * om[a];
          eta[0](1, a) = om[a];
        }
        eta[0](0, 3) = -eps * c / (2.0 * u.rho);
        eta[0](0, 4) = eps * c / (2.0 * u.p);
        return eta;
      };
      chart.profile_jacobian = [inst, k, om](std::span<const double> r) {
        const auto& F1 = inst->fn("F1");
        const auto& F2 = inst->fn("F2");
        const double ph = k.omega * r[0];
        const double co = std::cos(ph), si = std::sin(ph);
        const double f1 = F1.value(r[1]), f2 = F2.value(r[1]);
        const double f1p = F1.d1(r[1]), f2p = F2.d1(r[1]);
        const double cc = f1 * co + f2 * si;
        const double sc = f2 * co - f1 * si;
        const std::array<double, 2> dcc{k.omega * sc, f1p * co + f2p * si};
        const std::array<double, 2> dsc{-k.omega * cc, f2p * co - f1p * si};
        SmallMatrix df(5, 2);
        for (std::size_t s = 0; s < 2; ++s) {
          df(0, s) = dcc[s];
          df(1, s) = -k.a * dcc[s] + k.b * dsc[s];
          df(2, s) = -(om[0] * df(0, s) + om[1] * df(1, s)) / om[2];
        }
        return df;
      };
      break;
    }
    case Family::H0E: {
      const auto& P = inst->params;
      const Vec3 g = inst->external.g;
      const double c0 = P.c0, c1 = P.c1, c2 = P.c2;
      chart.wave_vectors = {[c0, c1, c2](const FluidState&) { return Covector{c0, c1, c2, 0.0}; },
                            [c1, c2, g](const FluidState& u) {
                              return Covector{-(c1 * g[1] - c2 * g[0] + g[0] + u.v[1]), c1, c2, 0.0};
                            }};
      chart.eta = [](const FluidState&) {
        auto eta = zero_eta();
        eta[0](1, 1) = -1.0;
        return eta;
      };
      // No closed form for df/dr here: finite differences.
      break;
    }
  }
  return chart;
}

// ---------------------------------------------------------------------------
// Evaluation

EvaluationResult evaluate(const SolutionInstance& inst, double t, const Vec3& x, const EvaluateOptions& opts) {
  EvaluationResult out;
  try {
    const auto solved = solve_invariants(inst, t, x, opts.continuation_step, opts.bracket_expansions);
    out.r = solved.r;
    out.newton_iters = solved.iters;
    out.state = state_any(inst, out.r[0], out.r[1]);
  } catch (const RootFindError& e) {
    out.issue = classify(e);
    return out;
  } catch (const DomainSignal& s) {
    out.issue = s.issue;
    return out;
  } catch (const DomainError&) {
    out.issue = DomainIssue::lambert_branch;
    return out;
  }
  const FluidState& u = out.state;
  const auto arr = u.as_array();
  if (!std::all_of(arr.begin(), arr.end(), [](double c) { return std::isfinite(c); })) {
    out.issue = DomainIssue::non_finite;
    return out;
  }
  if (!(u.rho > 0.0)) {
    out.issue = DomainIssue::nonpositive_density;
    return out;
  }
  if (!(u.p > 0.0)) {
    out.issue = DomainIssue::nonpositive_pressure;
    return out;
  }
  try {
    out.detM1 = m1_determinant(as_chart(inst), t, x, u);
  } catch (const DomainError&) {
    out.issue = DomainIssue::non_finite;
    return out;
  }
  if (!std::isfinite(out.detM1)) {
    out.issue = DomainIssue::non_finite;
    return out;
  }
  if (!(std::abs(out.detM1) >= opts.singularity_threshold)) {
    out.issue = DomainIssue::catastrophe;
    return out;
  }
  out.in_domain = true;
  return out;
}

std::optional<double> det_m1_at(const SolutionInstance& inst, double t, const Vec3& x, const EvaluateOptions& opts) {
  try {
    const auto solved = solve_invariants(inst, t, x, opts.continuation_step, opts.bracket_expansions);
    const FluidState u = state_any(inst, solved.r[0], solved.r[1]);
    const double d = m1_determinant(as_chart(inst), t, x, u);
    if (!std::isfinite(d)) return std::nullopt;
    return d;
  } catch (const RootFindError&) {
    return std::nullopt;
  } catch (const DomainSignal&) {
    return std::nullopt;
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Catastrophe

namespace {

double t0_with_slope(const SolutionInstance& inst, double b1) {
  if (inst.family != Family::E0Aplus) throw DomainError("catastrophe time is defined for E0Aplus only");
  const double l_om = dot(inst.params.lambda1, inst.external.omega);
  if (b1 == 0.0) throw DomainError("catastrophe time: B1 = 0, no blow-up");
  if (!(l_om > 0.0)) throw DomainError("catastrophe time: lambda1.Omega must be positive");
  return norm(inst.external.omega) / (b1 * std::sqrt(inst.params.A) * l_om);
}

}  // namespace

double catastrophe_time(const SolutionInstance& inst) {
  const auto& B = inst.fn("B");
  if (B.kind != ProfileKind::affine) {
    throw DomainError("catastrophe_time: unsupported for non-affine B (use linearized_catastrophe_time)");
  }
  return t0_with_slope(inst, B.coefficients.at(1));
}

double linearized_catastrophe_time(const SolutionInstance& inst) { return t0_with_slope(inst, inst.fn("B").d1(0.0)); }

E0AplusSpeed e0aplus_speed(const SolutionInstance& inst) {
  if (inst.family != Family::E0Aplus) throw DomainError("e0aplus_speed: E0Aplus only");
  const E0AConst ac(inst);
  return {ac.alpha, ac.K};
}

std::vector<Vec3> blowup_scan_line(const SolutionInstance& inst, std::size_t count, double half_width) {
  if (count == 0) throw DomainError("blowup_scan_line: empty line");
  const auto sp = e0aplus_speed(inst);
  const double t0 = linearized_catastrophe_time(inst);
  const Vec3& l = inst.params.lambda1;
  const double ll = dot(l, l);
  const double nl = std::sqrt(ll);
  // r1 = 0 travels with lambda1 . x = -(alpha B(0) + K) t.
  const double shift = -(sp.alpha * inst.fn("B").value(0.0) + sp.K) * t0 / ll;
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < count; ++i) {
    const double s = count == 1 ? 0.0 : -half_width + 2.0 * half_width * static_cast<double>(i) / static_cast<double>(count - 1);
    out.push_back({l[0] * (shift + s / nl), l[1] * (shift + s / nl), l[2] * (shift + s / nl)});
  }
  return out;
}

BlowupResult empirical_blowup_time(const SolutionInstance& inst, const std::vector<Vec3>& positions, double t_max,
                                   std::size_t n_scan) {
  if (positions.empty() || !(t_max > 0.0) || n_scan == 0) throw DomainError("empirical_blowup_time: empty scan");
  // Finer continuation than the default, and a tight bracket, so that the branch
  // is lost at the fold rather than replaced by a distant root.
  EvaluateOptions opts;
  opts.continuation_step = t_max / static_cast<double>(n_scan);
  opts.bracket_expansions = 2;
  auto alive = [&](double t, const Vec3& x) {
    const auto d = det_m1_at(inst, t, x, opts);
    return d && *d > 0.0;
  };

  std::optional<BlowupResult> best;
  for (const Vec3& x : positions) {
    double prev = 0.0;
    for (std::size_t j = 1; j <= n_scan; ++j) {
      const double t = t_max * static_cast<double>(j) / static_cast<double>(n_scan);
      if (best && t > best->time) break;
      if (alive(t, x)) {
        prev = t;
        continue;
      }
      double lo = prev, hi = t;
      for (int it = 0; it < 80 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (alive(mid, x) ? lo : hi) = mid;
      }
      const double tc = 0.5 * (lo + hi);
      if (!best || tc < best->time) best = BlowupResult{tc, x};
      break;
    }
  }
  if (!best) throw DomainError("empirical_blowup_time: det M1 stays positive up to t_max");
  return *best;
}

// ---------------------------------------------------------------------------

SolutionInstance stock_instance(Family f) {
  SolutionInstance s;
  s.family = f;
  switch (f) {
    case Family::E0E:
      s.external = {{1.0, 0.0, -1.0}, {1.0, 0.5, 1.0}, 1.4};
      s.params.c0 = 0.7;
      s.params.lambda1 = {1.0, 0.0, -1.0};
      s.functions["p"] = ProfileFunction::polynomial({2.0, 1.0});
      s.functions["v3"] = ProfileFunction::sine(1.0, 1.0);
      s.functions["v3"].weights = {1.0, 1.0};
      break;
    case Family::E0Aplus:
      s.external = {{0.8, 0.3, -0.6}, {0.6, 0.0, 0.8}, 1.0};
      s.params.A = 1.3;
      s.params.C1 = 0.2;
      s.params.c1 = 0.4;
      s.params.c2 = -0.3;
      s.params.lambda1 = {0.54, 0.0, 0.72};
      s.functions["B"] = ProfileFunction::jacobi(ProfileKind::jacobi_sn, 0.5);
      break;
    case Family::A0eE:
      s.external = {{0.8, 0.0, -0.36}, {0.36, 0.48, 0.8}, 1.4};
      s.params.p0 = 1.1;
      s.params.rho0 = 0.9;
      s.params.c0 = 0.3;
      s.functions["F1"] = ProfileFunction::sine(0.5, 1.0);
      s.functions["F2"] = ProfileFunction::sine(0.3, 2.0, std::numbers::pi / 2.0);
      break;
    case Family::H0E:
      s.external = {{0.2, -0.3, 0.5}, {0.0, 0.0, 1.0}, 1.4};
      s.params.c0 = 1.5;
      s.params.c1 = 0.62160996827066439;
      s.params.c2 = 0.78332690962748341;
      s.params.p0 = 1.0;
      s.functions["F1"] = ProfileFunction::sine(1.0, 1.0);
      s.functions["F2"] = ProfileFunction::sine(0.2, 1.0);
      s.functions["rho"] = ProfileFunction::sine(0.3, 1.0, std::numbers::pi / 2.0, 1.2);
      break;
  }
  return s;
}

}  // namespace rinv
