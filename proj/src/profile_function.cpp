#include "rinv/profile_function.hpp"

#include <cmath>
#include <string>

#include "rinv/errors.hpp"
#include "rinv/specfun.hpp"

namespace rinv {

std::string_view to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::polynomial: return "polynomial";
    case ProfileKind::sine: return "sine";
    case ProfileKind::exponential: return "exponential";
    case ProfileKind::jacobi_sn: return "jacobi_sn";
    case ProfileKind::jacobi_cn: return "jacobi_cn";
    case ProfileKind::jacobi_dn: return "jacobi_dn";
    case ProfileKind::affine: return "affine";
  }
  return "?";
}

ProfileKind profile_kind_from_string(std::string_view name) {
  for (ProfileKind k : {ProfileKind::polynomial, ProfileKind::sine, ProfileKind::exponential, ProfileKind::jacobi_sn,
                        ProfileKind::jacobi_cn, ProfileKind::jacobi_dn, ProfileKind::affine}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown function kind '" + std::string(name) + "'");
}

ProfileFunction ProfileFunction::polynomial(std::vector<double> c) {
  ProfileFunction f;
  f.kind = ProfileKind::polynomial;
  f.coefficients = std::move(c);
  return f;
}

ProfileFunction ProfileFunction::sine(double a, double w, double phi, double d) {
  ProfileFunction f;
  f.kind = ProfileKind::sine;
  f.coefficients = {a, w, phi, d};
  return f;
}

ProfileFunction ProfileFunction::exponential(double a, double b, double d) {
  ProfileFunction f;
  f.kind = ProfileKind::exponential;
  f.coefficients = {a, b, d};
  return f;
}

ProfileFunction ProfileFunction::jacobi(ProfileKind kind, double m, double a, double w, double phi, double d) {
  if (kind != ProfileKind::jacobi_sn && kind != ProfileKind::jacobi_cn && kind != ProfileKind::jacobi_dn)
    throw ConfigError("ProfileFunction::jacobi needs a Jacobi kind");
  ProfileFunction f;
  f.kind = kind;
  f.modulus = m;
  f.coefficients = {a, w, phi, d};
  return f;
}

ProfileFunction ProfileFunction::affine(double b0, double b1) {
  ProfileFunction f;
  f.kind = ProfileKind::affine;
  f.coefficients = {b0, b1};
  return f;
}

void ProfileFunction::validate() const {
  const std::string name(to_string(kind));
  auto need = [&](std::size_t n) {
    if (coefficients.size() != n)
      throw ConfigError(name + " function needs " + std::to_string(n) + " coefficients, got " +
                        std::to_string(coefficients.size()));
  };
  switch (kind) {
    case ProfileKind::polynomial:
      if (coefficients.empty()) throw ConfigError("polynomial function needs at least one coefficient");
      break;
    case ProfileKind::sine: need(4); break;
    case ProfileKind::exponential: need(3); break;
    case ProfileKind::jacobi_sn:
    case ProfileKind::jacobi_cn:
    case ProfileKind::jacobi_dn:
      need(4);
      if (!(modulus >= 0.0 && modulus <= 1.0)) throw ConfigError(name + " modulus must lie in [0, 1]");
      break;
    case ProfileKind::affine: need(2); break;
  }
  for (double c : coefficients)
    if (!std::isfinite(c)) throw ConfigError(name + " function has a non-finite coefficient");
  for (double w : weights)
    if (!std::isfinite(w)) throw ConfigError(name + " function has a non-finite argument weight");
}

namespace {

// Value and first two derivatives with respect to the inner argument u.
std::array<double, 3> jacobi_jet(ProfileKind kind, double u, double m) {
  const auto e = jacobi_elliptic(u, m);
  const double sn = e.sn, cn = e.cn, dn = e.dn;
  switch (kind) {
    case ProfileKind::jacobi_sn: return {sn, cn * dn, -sn * dn * dn - m * sn * cn * cn};
    case ProfileKind::jacobi_cn: return {cn, -sn * dn, -cn * dn * dn + m * sn * sn * cn};
    default: return {dn, -m * sn * cn, -m * dn * (cn * cn - sn * sn)};
  }
}

std::array<double, 3> jet(const ProfileFunction& f, double r) {
  const auto& c = f.coefficients;
  switch (f.kind) {
    case ProfileKind::polynomial: {
      // Horner for the value and both derivatives.
      double p = 0.0, dp = 0.0, ddp = 0.0;
      for (auto it = c.rbegin(); it != c.rend(); ++it) {
        ddp = ddp * r + 2.0 * dp;
        dp = dp * r + p;
        p = p * r + *it;
      }
      return {p, dp, ddp};
    }
    case ProfileKind::sine: {
      const double arg = c[1] * r + c[2];
      const double s = std::sin(arg), co = std::cos(arg);
      return {c[0] * s + c[3], c[0] * c[1] * co, -c[0] * c[1] * c[1] * s};
    }
    case ProfileKind::exponential: {
      const double e = c[0] * std::exp(c[1] * r);
      return {e + c[2], c[1] * e, c[1] * c[1] * e};
    }
    case ProfileKind::jacobi_sn:
    case ProfileKind::jacobi_cn:
    case ProfileKind::jacobi_dn: {
      const auto j = jacobi_jet(f.kind, c[1] * r + c[2], f.modulus);
      return {c[0] * j[0] + c[3], c[0] * c[1] * j[1], c[0] * c[1] * c[1] * j[2]};
    }
    case ProfileKind::affine:
      return {c[0] + c[1] * r, c[1], 0.0};
  }
  return {0.0, 0.0, 0.0};
}

}  // namespace

double ProfileFunction::value(double r) const { return jet(*this, r)[0]; }
double ProfileFunction::d1(double r) const { return jet(*this, r)[1]; }
double ProfileFunction::d2(double r) const { return jet(*this, r)[2]; }

}  // namespace rinv
