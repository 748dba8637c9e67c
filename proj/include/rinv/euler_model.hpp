#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "rinv/smallmat.hpp"
#include "rinv/vec3.hpp"

namespace rinv {

/// Hodograph point u = (v1, v2, v3, rho, p).
struct FluidState {
  Vec3 v{};
  double rho = 1.0;
  double p = 1.0;

  std::array<double, 5> as_array() const { return {v[0], v[1], v[2], rho, p}; }
  static FluidState from_array(const std::array<double, 5>& a) { return {{a[0], a[1], a[2]}, a[3], a[4]}; }

  /// rho > 0, p > 0 and every component finite.
  bool physical() const;
};

/// Gravity, rotation vector and the polytropic coefficient kappa.
struct ExternalParams {
  Vec3 g{};
  Vec3 omega{};
  double kappa = 1.4;

  /// Adiabatic exponent from kappa = 2 / (gamma - 1).
  double gamma() const { return 1.0 + 2.0 / kappa; }
  void validate() const;
};

enum class WaveFamily {
  Entropic,
  AcousticPlus,
  AcousticMinus,
  InhomEntropic,
  InhomAcoustic,
  Hydrodynamic,
};

std::string_view to_string(WaveFamily f);

struct WaveVector {
  double lambda0 = 0.0;
  Vec3 lambda{};
  WaveFamily family = WaveFamily::Hydrodynamic;

  Covector covector() const { return {lambda0, lambda[0], lambda[1], lambda[2]}; }
};

/// Row 4 of A^i. The typeset display omits the rho*delta_ij entries of the
/// continuity equation; with them absent the characteristic determinant is
/// (lambda0 + v.lambda)^5 and has no acoustic roots.
enum class ContinuityRow {
  with_divergence,
  advective,
};

/// A^0 (i = 0) or A^i (i = 1..3) at state u.
SmallMatrix assemble_matrix(int i, const FluidState& u, const ExternalParams& params,
                            ContinuityRow row = ContinuityRow::with_divergence);

/// B(u) = (g - Omega x v, 0, 0).
std::array<double, 5> source_B(const FluidState& u, const ExternalParams& params);

/// Squared sound speed kappa p / rho.
inline double sound_speed_sq(const FluidState& u, const ExternalParams& params) {
  return params.kappa * u.p / u.rho;
}

/// lambda0 A^0 + lambda_i A^i.
SmallMatrix characteristic_matrix(const Covector& lambda, const FluidState& u, const ExternalParams& params,
                                  ContinuityRow row = ContinuityRow::with_divergence);

/// (lambda0 + v.lambda)^3 [(lambda0 + v.lambda)^2 - (kappa p / rho)|lambda|^2].
double dispersion_value(const WaveVector& wv, const FluidState& u, const ExternalParams& params);

/// det(lambda0 A^0 + lambda_i A^i).
double characteristic_det(const WaveVector& wv, const FluidState& u, const ExternalParams& params,
                          ContinuityRow row = ContinuityRow::with_divergence);

/// Magnitude that characteristic_det is compared against: (|lambda0| + (|v| + c + 1)|lambda|)^5.
double characteristic_scale(const WaveVector& wv, const FluidState& u, const ExternalParams& params);

/// Builds a wave vector of the requested family at state u.
///
///  - Entropic:      (-lambda.v, lambda)
///  - Acoustic(+/-): (eps sqrt(kappa p / rho)|lambda| - v.lambda, lambda); InhomAcoustic takes eps
///  - InhomEntropic: (-v.g, g - Omega x v); `direction` is ignored
///  - Hydrodynamic:  (lambda0, lambda) with caller-supplied lambda0, rejected when
///                   lambda0 + v.lambda is within 1e-10 of 0 or +/- sqrt(kappa p / rho)|lambda|
WaveVector make_wave_vector(WaveFamily family, const Vec3& direction, const FluidState& u,
                            const ExternalParams& params, int epsilon = 1,
                            std::optional<double> lambda0 = std::nullopt);

/// rank(lambda_i A^i | B) == rank(lambda_i A^i), contraction over i = 0..3.
bool inhom_rank_condition(const WaveVector& wv, const FluidState& u, const ExternalParams& params,
                          double tol = kDefaultRankTolerance);

enum class InhomTag { E0, A0eps, H0 };
enum class HomTag { E, Aeps };

/// Superposition table for rank-2 solutions: row = inhomogeneous wave, column = homogeneous wave.
bool superposition_admissible(InhomTag inhom, HomTag hom);
/// String form accepting "E0", "A0e"/"A0eps", "H0" and "E", "Ae"/"Aeps"; unknown tags throw DomainError.
bool superposition_admissible(std::string_view inhom, std::string_view hom);

std::string_view to_string(InhomTag t);
std::string_view to_string(HomTag t);

}  // namespace rinv
