#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rinv/euler_model.hpp"
#include "rinv/invariant_core.hpp"
#include "rinv/profile_function.hpp"

namespace rinv {

enum class Family { E0E, E0Aplus, A0eE, H0E };

std::string_view to_string(Family f);
/// Throws ConfigError for unknown names.
Family family_from_string(std::string_view name);

struct SolutionParams {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double A = 1.0;
  double C1 = 0.0;
  double p0 = 1.0;
  double rho0 = 1.0;
  int eps = 1;
  int eps1 = 1;
  Vec3 lambda1{};
  /// A0eE only; defaults to eps1 * Omega when absent.
  std::optional<Vec3> lambda0;
};

/// A catalog entry. Function slots per family:
///   E0E      p(r0), v3(r0, r1)
///   E0Aplus  B(r1)
///   A0eE     F1(r1), F2(r1)
///   H0E      F1(r1), F2(r1), rho(r1)
struct SolutionInstance {
  Family family = Family::E0E;
  SolutionParams params;
  std::map<std::string, ProfileFunction> functions;
  ExternalParams external;

  /// Throws ConfigError when the slot is missing.
  const ProfileFunction& fn(const std::string& slot) const;
};

std::vector<std::string> required_slots(Family f);

struct Violation {
  std::string constraint;
  std::string detail;
};

inline constexpr double kConstraintTolerance = 1e-12;

/// Family admissibility constraints; empty when the instance is valid.
std::vector<Violation> validate(const SolutionInstance& inst);
/// Throws ConfigError listing every violated constraint.
void require_valid(const SolutionInstance& inst);

/// For E0E: checks dp/dr0 > 0 at n points of [r_lo, r_hi]; returns the
/// smallest sampled derivative.
double e0e_min_density(const SolutionInstance& inst, double r_lo, double r_hi, std::size_t n = 1000);

enum class DomainIssue {
  none,
  root_not_bracketed,
  no_convergence,
  lambert_branch,
  nonpositive_density,
  nonpositive_pressure,
  singular_denominator,
  catastrophe,
  non_finite,
};

std::string_view to_string(DomainIssue d);

struct EvaluationResult {
  FluidState state;
  std::array<double, 2> r{};
  double detM1 = 1.0;
  int newton_iters = 0;
  bool in_domain = false;
  DomainIssue issue = DomainIssue::none;
};

struct EvaluateOptions {
  /// Largest t step along the continuation path of the implicit invariant.
  double continuation_step = 0.05;
  /// Bracket doublings allowed per continuation step.
  int bracket_expansions = 12;
  double singularity_threshold = kSingularityThreshold;
};

/// Solution state at (t, x). Never throws for out-of-domain points; the
/// condition is reported in `issue`.
EvaluationResult evaluate(const SolutionInstance& inst, double t, const Vec3& x, const EvaluateOptions& opts = {});

/// State u = f(r0, r1) of the family.
FluidState profile_state(const SolutionInstance& inst, double r0, double r1);

/// Wave covectors, profile and derivative providers of the family.
InvariantChart as_chart(const SolutionInstance& inst);

/// Closed-form blow-up time |Omega| / (B1 sqrt(A) (lambda1 . Omega)) for
/// E0Aplus with affine B. Throws DomainError otherwise.
double catastrophe_time(const SolutionInstance& inst);

/// The same estimate with B1 replaced by B'(0), for any B.
double linearized_catastrophe_time(const SolutionInstance& inst);

/// det M1 at (t, x) with the invariants solved but no domain filtering.
/// Returns nullopt when the implicit solve fails.
std::optional<double> det_m1_at(const SolutionInstance& inst, double t, const Vec3& x,
                                const EvaluateOptions& opts = {});

/// E0Aplus invariant relation r1 = (alpha B(r1) + K) t + lambda1 . x.
struct E0AplusSpeed {
  double alpha;
  double K;
};
E0AplusSpeed e0aplus_speed(const SolutionInstance& inst);

/// `count` points on the segment along lambda1 centred where the r1 = 0
/// characteristic sits at the linearized blow-up time, |offset| <= half_width.
std::vector<Vec3> blowup_scan_line(const SolutionInstance& inst, std::size_t count, double half_width);

struct BlowupResult {
  double time;
  Vec3 x{};
};

/// Earliest t in (0, t_max] at which det M1 reaches zero over the given
/// positions, by scanning n_scan steps in t and bisecting the first crossing.
/// Throws DomainError when no crossing is found.
BlowupResult empirical_blowup_time(const SolutionInstance& inst, const std::vector<Vec3>& positions, double t_max,
                                   std::size_t n_scan = 400);

/// Stock parameter sets, used by tests and the shipped configs.
SolutionInstance stock_instance(Family f);

}  // namespace rinv
