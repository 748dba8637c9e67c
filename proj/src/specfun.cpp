#include "rinv/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "rinv/errors.hpp"

namespace rinv {

namespace {

constexpr double kE = 2.71828182845904523536;

// Series in p = sqrt(2(e phi + 1)) near the branch point, a few terms of the
// log expansion for large phi, and a Pade-like rational guess in between.
double lambert_initial_guess(double phi) {
  if (phi < -0.25) {
    const double p = std::sqrt(2.0 * (kE * phi + 1.0));
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
  }
  if (phi < 3.0) {
    return phi * (1.0 + 4.0 / 3.0 * phi) / (1.0 + phi * (7.0 / 3.0 + 5.0 / 6.0 * phi));
  }
  const double l1 = std::log(phi);
  const double l2 = std::log(l1);
  return l1 - l2 + l2 / l1;
}

}  // namespace

double lambert_w0(double phi) {
  if (std::isnan(phi)) throw DomainError("lambert_w0: argument is NaN");
  if (phi < kLambertBranchPoint) {
    // Inputs a rounding step below -1/e are treated as the branch point.
    if (phi > kLambertBranchPoint * (1.0 + 4.0 * std::numeric_limits<double>::epsilon())) return -1.0;
    throw DomainError("lambert_w0: argument below branch point (phi = " + std::to_string(phi) + ")");
  }
  if (phi == 0.0) return 0.0;
  if (phi == kLambertBranchPoint) return -1.0;
  if (std::isinf(phi)) return phi;

  double w = lambert_initial_guess(phi);
  constexpr int kMaxIterations = 50;
  for (int it = 0; it < kMaxIterations; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - phi;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    // Halley step.
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    if (denom == 0.0 || !std::isfinite(denom)) break;
    double dw = f / denom;
    double next = w - dw;
    if (next < -1.0) next = 0.5 * (w - 1.0);
    dw = w - next;
    w = next;
    if (std::abs(dw) <= 1e-15 * (1.0 + std::abs(w))) break;
  }
  return w;
}

EllipticTriple jacobi_elliptic(double u, double m) {
  if (!(m >= 0.0 && m <= 1.0)) {
    throw DomainError("jacobi_elliptic: parameter m = " + std::to_string(m) + " outside [0, 1]");
  }
  if (m == 0.0) return {std::sin(u), std::cos(u), 1.0};
  if (m == 1.0) {
    const double sech = 1.0 / std::cosh(u);
    return {std::tanh(u), sech, sech};
  }

  // Arithmetic-geometric mean with descending Landen back-substitution.
  constexpr int kMaxDepth = 16;
  std::array<double, kMaxDepth + 1> a{};
  std::array<double, kMaxDepth + 1> c{};
  a[0] = 1.0;
  double b = std::sqrt(1.0 - m);
  c[0] = std::sqrt(m);
  int n = 0;
  while (n < kMaxDepth && std::abs(c[n]) > 1e-16) {
    a[n + 1] = 0.5 * (a[n] + b);
    c[n + 1] = 0.5 * (a[n] - b);
    b = std::sqrt(a[n] * b);
    ++n;
  }
  double phi = std::ldexp(a[n] * u, n);
  for (int j = n; j > 0; --j) phi = 0.5 * (phi + std::asin(c[j] / a[j] * std::sin(phi)));

  const double sn = std::sin(phi);
  const double cn = std::cos(phi);
  // dn > 0 on the real line for m < 1.
  const double dn = std::sqrt(1.0 - m * sn * sn);
  return {sn, cn, dn};
}

}  // namespace rinv
