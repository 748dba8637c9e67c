#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace rinv {

enum class ProfileKind {
  polynomial,   // c0 + c1 r + c2 r^2 + ...
  sine,         // a sin(w r + phi) + d              coefficients [a, w, phi, d]
  exponential,  // a exp(b r) + d                    coefficients [a, b, d]
  jacobi_sn,    // a sn(w r + phi | m) + d           coefficients [a, w, phi, d]
  jacobi_cn,
  jacobi_dn,
  affine,       // B0 + B1 r                         coefficients [B0, B1]
};

std::string_view to_string(ProfileKind k);
/// Throws ConfigError for unknown names.
ProfileKind profile_kind_from_string(std::string_view name);

/// One of the arbitrary functions of a catalog entry. Univariate slots read
/// the argument r directly; bivariate slots such as v3(r0, r1) evaluate the
/// same function at weights[0] r0 + weights[1] r1.
struct ProfileFunction {
  ProfileKind kind = ProfileKind::polynomial;
  std::vector<double> coefficients;
  /// Parameter m = k^2 for the Jacobi kinds.
  double modulus = 0.0;
  std::array<double, 2> weights{1.0, 0.0};

  static ProfileFunction polynomial(std::vector<double> c);
  static ProfileFunction sine(double a, double w, double phi = 0.0, double d = 0.0);
  static ProfileFunction exponential(double a, double b, double d = 0.0);
  static ProfileFunction jacobi(ProfileKind kind, double m, double a = 1.0, double w = 1.0, double phi = 0.0,
                                double d = 0.0);
  static ProfileFunction affine(double b0, double b1);

  /// Coefficient count and modulus range; throws ConfigError.
  void validate() const;

  double value(double r) const;
  double d1(double r) const;
  double d2(double r) const;

  double value2(double r0, double r1) const { return value(weights[0] * r0 + weights[1] * r1); }
  /// Partial derivatives of value2 with respect to r0 and r1.
  std::array<double, 2> grad2(double r0, double r1) const {
    const double d = d1(weights[0] * r0 + weights[1] * r1);
    return {weights[0] * d, weights[1] * d};
  }
};

}  // namespace rinv
