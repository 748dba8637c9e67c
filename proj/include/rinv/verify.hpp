#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rinv/euler_model.hpp"
#include "rinv/invariant_core.hpp"
#include "rinv/sampling.hpp"
#include "rinv/solutions.hpp"

namespace rinv {

/// A solution field: nullopt outside its domain.
using Field = std::function<std::optional<FluidState>(double t, const Vec3& x)>;

Field field_of(const SolutionInstance& inst);

struct FdPartials {
  SmallMatrix du{5, 4};
  /// Some column used a one-sided O(h) stencil.
  bool one_sided = false;
  /// False when no stencil stayed in the domain.
  bool ok = true;
};

/// Default step 1e-5 (1 + |coordinate|).
double default_fd_step(double coordinate);

/// Central-difference du/dt, du/dx^i (columns t, x, y, z). A
/// non-positive h selects the default step per coordinate.
FdPartials fd_partials(const Field& field, double t, const Vec3& x, double h = 0.0);

struct Tolerances {
  double residual = 1e-6;
  double audit = 1e-8;
  double constraint = 1e-8;
  double rank_fraction = 0.99;
};

inline constexpr double kFdRankTolerance = 1e-6;

struct SampleRow {
  SpaceTimePoint point{};
  EvaluationResult eval;
  /// Per-equation relative PDE residual (NaN when not evaluated).
  EquationVector residual{};
  std::size_t rank = 0;
  bool one_sided = false;
};

struct ResidualReport {
  std::string family;
  std::size_t samples = 0;
  std::size_t in_domain = 0;
  std::size_t out_of_domain = 0;
  std::size_t one_sided = 0;
  EquationVector eq_max{};
  EquationVector eq_rms{};
  std::array<std::size_t, 6> rank_histogram{};
  double min_abs_det_m1 = 0.0;

  double audit_a = 0.0;
  double audit_b = 0.0;
  double audit_c_offdiag = 0.0;
  double audit_c_diag = 0.0;
  double audit_d = 0.0;
  double constraint_max = 0.0;

  bool domain_too_small = false;
  bool residual_pass = false;
  bool rank_pass = false;
  bool audit_pass = false;
  bool constraint_pass = false;
  Tolerances tolerances;
  std::vector<SampleRow> rows;

  double max_residual() const;
  double audit_max() const;
  double rank2_fraction() const;
  bool verified() const { return residual_pass && rank_pass && audit_pass && !domain_too_small; }
  /// "verified" or "unverified: possible transcription issue".
  std::string status() const;
};

/// PDE residual, rank, differential-constraint and trace-condition audit over
/// the sample points. Residuals use central differences and are normalised by
/// 1 + ||A||_inf ||du||_inf + ||B||_inf.
ResidualReport residual_report(const SolutionInstance& inst, const SampleSpec& spec, const Tolerances& tol = {});

/// Relative residual of A^0 u_t + A^i u_i - B for a generic field.
std::optional<EquationVector> pde_residual(const Field& field, const ExternalParams& params, double t,
                                           const Vec3& x, double h = 0.0);

using BasisProvider = std::function<SymmetryBasis(const FluidState&)>;

/// max |xi^i_a du^alpha/dx^i| / (1 + ||du||_inf) over the points.
double constraint_violation(const Field& field, const BasisProvider& basis, const std::vector<SpaceTimePoint>& pts);

/// constraint_violation for a catalog instance, basis from its chart.
double constraint_check(const SolutionInstance& inst, const SampleSpec& spec);

}  // namespace rinv
