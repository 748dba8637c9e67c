#pragma once

namespace rinv {

/// -1/e, the branch point of the Lambert W function.
inline constexpr double kLambertBranchPoint = -0.36787944117144232159552377016146;

/// Principal branch W0 of the Lambert W function: w e^w = phi, w >= -1.
/// Throws DomainError for phi < -1/e.
double lambert_w0(double phi);

struct EllipticTriple {
  double sn;
  double cn;
  double dn;
};

/// Jacobi elliptic functions sn(u|m), cn(u|m), dn(u|m) for the parameter
/// m = k^2 in [0, 1]. Throws DomainError outside that range.
EllipticTriple jacobi_elliptic(double u, double m);

}  // namespace rinv
