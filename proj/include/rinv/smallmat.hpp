#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <vector>

#include "rinv/errors.hpp"

namespace rinv {

/// Dense row-major matrix with inline storage, at most kMaxDim x kMaxDim.
///
/// Sized for the hodograph algebra of the Euler system: 5x5 coefficient
/// matrices, the 5x6 augmented rank test, 5xk profile Jacobians and the
/// kxk matrices M1 = I - (eta . x) df/dr.
class SmallMatrix {
 public:
  static constexpr std::size_t kMaxDim = 6;

  SmallMatrix() : SmallMatrix(1, 1) {}
  SmallMatrix(std::size_t rows, std::size_t cols);
  SmallMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static SmallMatrix identity(std::size_t n);
  static SmallMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static SmallMatrix diagonal(std::initializer_list<double> d);
  static SmallMatrix column(std::initializer_list<double> c);
  static SmallMatrix row(std::initializer_list<double> r);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * kMaxDim + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * kMaxDim + c]; }

  SmallMatrix transpose() const;
  /// Matrix with row r and column c deleted.
  SmallMatrix minor_matrix(std::size_t r, std::size_t c) const;

  /// Maximum absolute row sum.
  double norm_inf() const;
  double max_abs() const;
  bool all_finite() const;

  SmallMatrix& operator+=(const SmallMatrix& o);
  SmallMatrix& operator-=(const SmallMatrix& o);
  SmallMatrix& operator*=(double s);

  friend SmallMatrix operator+(SmallMatrix a, const SmallMatrix& b) { return a += b; }
  friend SmallMatrix operator-(SmallMatrix a, const SmallMatrix& b) { return a -= b; }
  friend SmallMatrix operator*(SmallMatrix a, double s) { return a *= s; }
  friend SmallMatrix operator*(double s, SmallMatrix a) { return a *= s; }
  friend SmallMatrix operator*(const SmallMatrix& a, const SmallMatrix& b);

  friend bool operator==(const SmallMatrix& a, const SmallMatrix& b);

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::array<double, kMaxDim * kMaxDim> data_{};
};

double trace(const SmallMatrix& m);

/// Cofactor expansion up to 3x3, LU with partial pivoting above.
double determinant(const SmallMatrix& m);

/// Transpose of the cofactor matrix; defined for singular input too.
SmallMatrix adjugate(const SmallMatrix& m);

/// Inverse via Gauss-Jordan with partial pivoting. Throws DomainError when
/// the pivot falls below `singular_tol` times the largest entry.
SmallMatrix inverse(const SmallMatrix& m, double singular_tol = 1e-14);

/// M^2 - tr(M) M + det(M) I for 2x2 input, or
/// M^3 - tr(M) M^2 + (tr(M)^2 - tr(M^2))/2 M - det(M) I for 3x3 input.
SmallMatrix cayley_hamilton_residual(const SmallMatrix& m);

/// |det(I_k - P Q) - det(I_q - Q P)| for P (k x q) and Q (q x k).
double weinstein_aronszajn_gap(const SmallMatrix& p, const SmallMatrix& q);

/// Singular values in descending order, one-sided Jacobi (Hestenes).
std::vector<double> singular_values(const SmallMatrix& m);

inline constexpr double kDefaultRankTolerance = 1e-8;

/// Count of singular values above rel_tol * sigma_max.
std::size_t numeric_rank(const SmallMatrix& m, double rel_tol = kDefaultRankTolerance);

struct JacobiResiduals {
  /// |d/dxi det M - Tr(adj M M')|
  double determinant;
  /// ||d/dxi adj M - (Tr(adj M M') I - adj M M') M^-1||_inf
  double adjugate;
};

using MatrixPath = std::function<SmallMatrix(double)>;

/// Checks the two derivative identities for det and adj along a matrix path,
/// with every derivative taken by central differences at step h.
JacobiResiduals jacobi_identity_residuals(const MatrixPath& path, double xi, double h);

}  // namespace rinv
