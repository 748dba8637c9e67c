#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "rinv/euler_model.hpp"
#include "rinv/smallmat.hpp"

namespace rinv {

using EquationVector = std::array<double, 5>;

/// State-dependent wave covector lambda^s(u).
using WaveProvider = std::function<Covector(const FluidState&)>;
/// u = f(r^0, ..., r^{k-1}).
using ProfileMap = std::function<FluidState(std::span<const double>)>;
/// df/dr, 5 x k.
using ProfileJacobianProvider = std::function<SmallMatrix(std::span<const double>)>;
/// eta_i = d lambda^s_i / d u^alpha, one k x 5 block per i = 0..3.
using EtaProvider = std::function<std::array<SmallMatrix, 4>(const FluidState&)>;

/// A rank-k solution written in Riemann invariants. Empty Jacobian or eta
/// providers fall back to 5-point central differences with step
/// h = 1e-6 (1 + |argument|).
struct InvariantChart {
  std::vector<WaveProvider> wave_vectors;
  ProfileMap profile;
  ProfileJacobianProvider profile_jacobian;
  EtaProvider eta;
  ExternalParams params;

  std::size_t k() const { return wave_vectors.size(); }
};

/// k x 4 matrix whose rows are the wave covectors at u.
SmallMatrix lambda_matrix(const InvariantChart& chart, const FluidState& u);
std::array<SmallMatrix, 4> eta_matrices(const InvariantChart& chart, const FluidState& u);
SmallMatrix profile_jacobian(const InvariantChart& chart, std::span<const double> r);

/// Per-equation 4 x 5 blocks of the trace form: (A^mu)_{i alpha} = (A^i)_{mu alpha}.
std::array<SmallMatrix, 5> coefficient_blocks(const FluidState& u, const ExternalParams& params);

/// Tr(A^mu X) for a 5 x 4 matrix X.
double trace_form(const SmallMatrix& block, const SmallMatrix& x);

/// r^s = lambda^s_0(u) t + lambda^s(u) . x
std::vector<double> riemann_invariants(const InvariantChart& chart, double t, const Vec3& x, const FluidState& u);

struct SymmetryBasis {
  std::vector<Covector> xi;
};

/// Orthonormal basis of the annihilator of span{lambda^s(u)} in R^4.
/// Throws DomainError when the wave covectors have rank < k.
SymmetryBasis annihilator_basis(const InvariantChart& chart, const FluidState& u);

inline constexpr double kSingularityThreshold = 1e-10;

struct GradientResult {
  SmallMatrix du{5, 4};
  double det_m1 = 1.0;
  double det_m2 = 1.0;
  /// |det M1 - det M2|.
  double wa_gap = 0.0;
};

/// Non-throwing M1 = I_k - (eta_0 t + eta_i x^i) df/dr and its determinant.
SmallMatrix m1_matrix(const InvariantChart& chart, double t, const Vec3& x, const FluidState& u);
double m1_determinant(const InvariantChart& chart, double t, const Vec3& x, const FluidState& u);

/// du = df/dr M1^-1 lambda. Throws CatastropheError when |det M1| < threshold.
GradientResult gradient_du(const InvariantChart& chart, double t, const Vec3& x, const FluidState& u,
                           double threshold = kSingularityThreshold);

/// Trace conditions for rank-2 solutions evaluated at the invariant point r
/// (state u = f(r)). Entries are normalised by 1 + ||A^mu|| ||df/dr|| ||lambda||;
/// determinant conditions by (1 + ||eta_i|| ||df/dr||)^k.
struct Rank2Residuals {
  EquationVector a{};
  std::array<EquationVector, 4> b{};
  /// Symmetrised double-eta trace for the six pairs i < j, in lexicographic order.
  std::array<EquationVector, 6> c_offdiag{};
  /// Tr[A df/dr eta_i df/dr eta_i df/dr lambda] for i = 0..3.
  std::array<EquationVector, 4> c_diag{};
  std::array<double, 4> d{};

  double max_a() const;
  double max_b() const;
  double max_c_offdiag() const;
  double max_c_diag() const;
  double max_d() const;
  /// Largest entry over conditions a, b, c (i != j) and d.
  double max_all() const;
};

Rank2Residuals rank2_condition_residuals(const InvariantChart& chart, std::span<const double> r);

struct IndexTriple {
  int i1, i2, i3;
};

/// Conditions for rank-3 solutions, same normalisation as Rank2Residuals.
struct Rank3Residuals {
  EquationVector a{};
  std::array<EquationVector, 4> b{};
  /// (i1, i2) with i1 <= i2, ten pairs in lexicographic order.
  std::array<EquationVector, 10> c{};
  /// Multisets i1 <= i2 <= i3 that are not all equal (16 of them).
  std::vector<IndexTriple> d_indices;
  std::vector<EquationVector> d;
  std::array<double, 4> e{};

  double max_a() const;
  double max_b() const;
  double max_c() const;
  double max_d() const;
  double max_e() const;
  double max_all() const;
};

Rank3Residuals rank3_condition_residuals(const InvariantChart& chart, std::span<const double> r);

/// Unnormalised sum over the six position permutations of
/// Tr[A df/dr eta_a df/dr eta_b df/dr eta_c df/dr lambda].
double six_term_trace(const SmallMatrix& block, const SmallMatrix& df, const std::array<SmallMatrix, 4>& eta,
                      const SmallMatrix& lambda, IndexTriple idx);

/// Both sides of the Cayley-Hamilton contraction for N = eta_i df/dr (k = 2 or 3),
/// with T_n = Tr[A df/dr N^n lambda]:
///   k = 2:  T_2 - tr(N) T_1          and  -det(N) T_0
///   k = 3:  T_3 - tr(N) T_2 + (tr(N)^2 - tr(N^2))/2 T_1  and  det(N) T_0
struct ContractionSides {
  double lhs;
  double rhs;
};
ContractionSides cayley_hamilton_contraction(const SmallMatrix& block, const SmallMatrix& df,
                                             const SmallMatrix& eta_i, const SmallMatrix& lambda);

/// Tr[A^mu df/dr adj(M1) lambda] - det(M1) B^mu at (t, x).
EquationVector trace_poly_residual(const InvariantChart& chart, double t, const Vec3& x, const FluidState& u);

}  // namespace rinv
