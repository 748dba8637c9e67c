#include "rinv/euler_model.hpp"

#include <cmath>
#include <string>

#include "rinv/errors.hpp"

namespace rinv {

bool FluidState::physical() const {
  return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]) && std::isfinite(rho) &&
         std::isfinite(p) && rho > 0.0 && p > 0.0;
}

void ExternalParams::validate() const {
  for (double c : g)
    if (!std::isfinite(c)) throw DomainError("gravity vector must be finite");
  for (double c : omega)
    if (!std::isfinite(c)) throw DomainError("rotation vector must be finite");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be positive");
}

std::string_view to_string(WaveFamily f) {
  switch (f) {
    case WaveFamily::Entropic: return "Entropic";
    case WaveFamily::AcousticPlus: return "AcousticPlus";
    case WaveFamily::AcousticMinus: return "AcousticMinus";
    case WaveFamily::InhomEntropic: return "InhomEntropic";
    case WaveFamily::InhomAcoustic: return "InhomAcoustic";
    case WaveFamily::Hydrodynamic: return "Hydrodynamic";
  }
  return "?";
}

SmallMatrix assemble_matrix(int i, const FluidState& u, const ExternalParams& params, ContinuityRow row) {
  if (i < 0 || i > 3) throw DomainError("assemble_matrix: index " + std::to_string(i) + " not in 0..3");
  SmallMatrix a(5, 5);
  const double kp_rho = params.kappa * u.p / u.rho;
  if (i == 0) {
    for (std::size_t d = 0; d < 5; ++d) a(d, d) = 1.0;
    a(4, 3) = -kp_rho;
    return a;
  }
  const std::size_t axis = static_cast<std::size_t>(i - 1);
  const double vi = u.v[axis];
  for (std::size_t d = 0; d < 5; ++d) a(d, d) = vi;
  a(axis, 4) = 1.0 / u.rho;
  a(4, 3) = -kp_rho * vi;
  if (row == ContinuityRow::with_divergence) a(3, axis) = u.rho;
  return a;
}

std::array<double, 5> source_B(const FluidState& u, const ExternalParams& params) {
  const Vec3& v = u.v;
  const Vec3& om = params.omega;
  const Vec3& g = params.g;
  return {g[0] - (om[1] * v[2] - om[2] * v[1]), g[1] - (om[2] * v[0] - om[0] * v[2]),
          g[2] - (om[0] * v[1] - om[1] * v[0]), 0.0, 0.0};
}

SmallMatrix characteristic_matrix(const Covector& lambda, const FluidState& u, const ExternalParams& params,
                                  ContinuityRow row) {
  SmallMatrix m = lambda[0] * assemble_matrix(0, u, params, row);
  for (int i = 1; i <= 3; ++i) m += lambda[static_cast<std::size_t>(i)] * assemble_matrix(i, u, params, row);
  return m;
}

double dispersion_value(const WaveVector& wv, const FluidState& u, const ExternalParams& params) {
  const double w = wv.lambda0 + dot(u.v, wv.lambda);
  const double l2 = dot(wv.lambda, wv.lambda);
  return w * w * w * (w * w - sound_speed_sq(u, params) * l2);
}

double characteristic_det(const WaveVector& wv, const FluidState& u, const ExternalParams& params,
                          ContinuityRow row) {
  return determinant(characteristic_matrix(wv.covector(), u, params, row));
}

double characteristic_scale(const WaveVector& wv, const FluidState& u, const ExternalParams& params) {
  const double c = std::sqrt(sound_speed_sq(u, params));
  const double s = std::abs(wv.lambda0) + (norm(u.v) + c + 1.0) * norm(wv.lambda);
  return s * s * s * s * s;
}

WaveVector make_wave_vector(WaveFamily family, const Vec3& direction, const FluidState& u,
                            const ExternalParams& params, int epsilon, std::optional<double> lambda0) {
  if (family == WaveFamily::InhomEntropic) {
    const Vec3 spatial = params.g - cross(params.omega, u.v);
    return {-dot(u.v, params.g), spatial, family};
  }
  if (norm(direction) == 0.0) throw DomainError("make_wave_vector: zero propagation direction");
  const double c = std::sqrt(sound_speed_sq(u, params));
  const double vl = dot(u.v, direction);
  switch (family) {
    case WaveFamily::Entropic:
      return {-vl, direction, family};
    case WaveFamily::AcousticPlus:
      return {c * norm(direction) - vl, direction, family};
    case WaveFamily::AcousticMinus:
      return {-c * norm(direction) - vl, direction, family};
    case WaveFamily::InhomAcoustic: {
      if (epsilon != 1 && epsilon != -1) throw DomainError("make_wave_vector: epsilon must be +1 or -1");
      return {epsilon * c * norm(direction) - vl, direction, family};
    }
    case WaveFamily::Hydrodynamic: {
      if (!lambda0) throw DomainError("make_wave_vector: hydrodynamic wave vector needs lambda0");
      const double w = *lambda0 + vl;
      const double ac = c * norm(direction);
      constexpr double kExclusion = 1e-10;
      if (std::abs(w) <= kExclusion || std::abs(w - ac) <= kExclusion || std::abs(w + ac) <= kExclusion) {
        throw DomainError("make_wave_vector: hydrodynamic lambda0 lies on an entropic or acoustic root");
      }
      return {*lambda0, direction, family};
    }
    case WaveFamily::InhomEntropic:
      break;
  }
  throw DomainError("make_wave_vector: unknown family");
}

bool inhom_rank_condition(const WaveVector& wv, const FluidState& u, const ExternalParams& params, double tol) {
  const SmallMatrix m = characteristic_matrix(wv.covector(), u, params);
  const auto b = source_B(u, params);
  SmallMatrix aug(5, 6);
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t c = 0; c < 5; ++c) aug(r, c) = m(r, c);
    aug(r, 5) = b[r];
  }
  return numeric_rank(aug, tol) == numeric_rank(m, tol);
}

bool superposition_admissible(InhomTag inhom, HomTag hom) {
  // Only the A0_eps / A_eps combination admits no rank-2 superposition.
  return !(inhom == InhomTag::A0eps && hom == HomTag::Aeps);
}

bool superposition_admissible(std::string_view inhom, std::string_view hom) {
  InhomTag in{};
  if (inhom == "E0") in = InhomTag::E0;
  else if (inhom == "A0e" || inhom == "A0eps") in = InhomTag::A0eps;
  else if (inhom == "H0") in = InhomTag::H0;
  else throw DomainError("superposition_admissible: unknown inhomogeneous tag '" + std::string(inhom) + "'");
  HomTag h{};
  if (hom == "E") h = HomTag::E;
  else if (hom == "Ae" || hom == "Aeps") h = HomTag::Aeps;
  else throw DomainError("superposition_admissible: unknown homogeneous tag '" + std::string(hom) + "'");
  return superposition_admissible(in, h);
}

std::string_view to_string(InhomTag t) {
  switch (t) {
    case InhomTag::E0: return "E0";
    case InhomTag::A0eps: return "A0e";
    case InhomTag::H0: return "H0";
  }
  return "?";
}

std::string_view to_string(HomTag t) {
  switch (t) {
    case HomTag::E: return "E";
    case HomTag::Aeps: return "Ae";
  }
  return "?";
}

}  // namespace rinv
