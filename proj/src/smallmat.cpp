#include "rinv/smallmat.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace rinv {

namespace {

void require_square(const SmallMatrix& m, const char* op) {
  if (!m.square()) {
    throw ShapeError(std::string(op) + ": matrix is " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + ", expected square");
  }
}

void require_dims(std::size_t rows, std::size_t cols) {
  if (rows < 1 || cols < 1 || rows > SmallMatrix::kMaxDim || cols > SmallMatrix::kMaxDim) {
    throw ShapeError("SmallMatrix dimensions " + std::to_string(rows) + "x" + std::to_string(cols) +
                     " outside 1.." + std::to_string(SmallMatrix::kMaxDim));
  }
}

double det_lu(SmallMatrix a) {
  const std::size_t n = a.rows();
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < n; ++r) {
      if (std::abs(a(r, k)) > std::abs(a(piv, k))) piv = r;
    }
    if (a(piv, k) == 0.0) return 0.0;
    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(piv, c));
      det = -det;
    }
    det *= a(k, k);
    for (std::size_t r = k + 1; r < n; ++r) {
      const double f = a(r, k) / a(k, k);
      for (std::size_t c = k; c < n; ++c) a(r, c) -= f * a(k, c);
    }
  }
  return det;
}

}  // namespace

SmallMatrix::SmallMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
  require_dims(rows, cols);
}

SmallMatrix::SmallMatrix(std::initializer_list<std::initializer_list<double>> init)
    : SmallMatrix(init.size(), init.size() ? init.begin()->size() : 0) {
  std::size_t r = 0;
  for (const auto& row : init) {
    if (row.size() != cols_) throw ShapeError("SmallMatrix: ragged initializer");
    std::size_t c = 0;
    for (double v : row) (*this)(r, c++) = v;
    ++r;
  }
}

SmallMatrix SmallMatrix::identity(std::size_t n) {
  SmallMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

SmallMatrix SmallMatrix::diagonal(std::initializer_list<double> d) {
  SmallMatrix m(d.size(), d.size());
  std::size_t i = 0;
  for (double v : d) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

SmallMatrix SmallMatrix::column(std::initializer_list<double> c) {
  SmallMatrix m(c.size(), 1);
  std::size_t i = 0;
  for (double v : c) m(i++, 0) = v;
  return m;
}

SmallMatrix SmallMatrix::row(std::initializer_list<double> r) { return column(r).transpose(); }

SmallMatrix SmallMatrix::transpose() const {
  SmallMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

SmallMatrix SmallMatrix::minor_matrix(std::size_t skip_r, std::size_t skip_c) const {
  if (rows_ < 2 || cols_ < 2) throw ShapeError("minor_matrix: matrix too small");
  SmallMatrix m(rows_ - 1, cols_ - 1);
  for (std::size_t r = 0, mr = 0; r < rows_; ++r) {
    if (r == skip_r) continue;
    for (std::size_t c = 0, mc = 0; c < cols_; ++c) {
      if (c == skip_c) continue;
      m(mr, mc++) = (*this)(r, c);
    }
    ++mr;
  }
  return m;
}

double SmallMatrix::norm_inf() const {
  double best = 0.0;
  for (std::size_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) s += std::abs((*this)(r, c));
    best = std::max(best, s);
  }
  return best;
}

double SmallMatrix::max_abs() const {
  double best = 0.0;
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) best = std::max(best, std::abs((*this)(r, c)));
  return best;
}

bool SmallMatrix::all_finite() const {
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      if (!std::isfinite((*this)(r, c))) return false;
  return true;
}

SmallMatrix& SmallMatrix::operator+=(const SmallMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeError("matrix sum: shape mismatch");
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) += o(r, c);
  return *this;
}

SmallMatrix& SmallMatrix::operator-=(const SmallMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeError("matrix difference: shape mismatch");
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) -= o(r, c);
  return *this;
}

SmallMatrix& SmallMatrix::operator*=(double s) {
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) *= s;
  return *this;
}

SmallMatrix operator*(const SmallMatrix& a, const SmallMatrix& b) {
  if (a.cols_ != b.rows_) {
    throw ShapeError("matrix product: " + std::to_string(a.rows_) + "x" + std::to_string(a.cols_) +
                     " times " + std::to_string(b.rows_) + "x" + std::to_string(b.cols_));
  }
  SmallMatrix p(a.rows_, b.cols_);
  for (std::size_t r = 0; r < a.rows_; ++r)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const double ark = a(r, k);
      for (std::size_t c = 0; c < b.cols_; ++c) p(r, c) += ark * b(k, c);
    }
  return p;
}

bool operator==(const SmallMatrix& a, const SmallMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
  for (std::size_t r = 0; r < a.rows_; ++r)
    for (std::size_t c = 0; c < a.cols_; ++c)
      if (a(r, c) != b(r, c)) return false;
  return true;
}

double trace(const SmallMatrix& m) {
  require_square(m, "trace");
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) s += m(i, i);
  return s;
}

double determinant(const SmallMatrix& m) {
  require_square(m, "determinant");
  switch (m.rows()) {
    case 1:
      return m(0, 0);
    case 2:
      return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
             m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default:
      return det_lu(m);
  }
}

SmallMatrix adjugate(const SmallMatrix& m) {
  require_square(m, "adjugate");
  const std::size_t n = m.rows();
  if (n == 1) return SmallMatrix::identity(1);
  SmallMatrix adj(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const double sign = ((r + c) % 2 == 0) ? 1.0 : -1.0;
      adj(c, r) = sign * determinant(m.minor_matrix(r, c));
    }
  return adj;
}

SmallMatrix inverse(const SmallMatrix& m, double singular_tol) {
  require_square(m, "inverse");
  const std::size_t n = m.rows();
  SmallMatrix a = m;
  SmallMatrix inv = SmallMatrix::identity(n);
  const double scale = std::max(m.max_abs(), 1e-300);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::abs(a(r, k)) > std::abs(a(piv, k))) piv = r;
    if (std::abs(a(piv, k)) <= singular_tol * scale) throw DomainError("inverse: matrix is singular");
    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(a(k, c), a(piv, c));
        std::swap(inv(k, c), inv(piv, c));
      }
    }
    const double d = a(k, k);
    for (std::size_t c = 0; c < n; ++c) {
      a(k, c) /= d;
      inv(k, c) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == k) continue;
      const double f = a(r, k);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) {
        a(r, c) -= f * a(k, c);
        inv(r, c) -= f * inv(k, c);
      }
    }
  }
  return inv;
}

SmallMatrix cayley_hamilton_residual(const SmallMatrix& m) {
  require_square(m, "cayley_hamilton_residual");
  const std::size_t n = m.rows();
  const SmallMatrix id = SmallMatrix::identity(n);
  const double tr = trace(m);
  const double det = determinant(m);
  const SmallMatrix m2 = m * m;
  if (n == 2) return m2 - tr * m + det * id;
  if (n == 3) {
    const double c1 = 0.5 * (tr * tr - trace(m2));
    return m2 * m - tr * m2 + c1 * m - det * id;
  }
  throw ShapeError("cayley_hamilton_residual: only 2x2 and 3x3 are supported");
}

double weinstein_aronszajn_gap(const SmallMatrix& p, const SmallMatrix& q) {
  if (p.cols() != q.rows() || p.rows() != q.cols()) {
    throw ShapeError("weinstein_aronszajn_gap: P must be k x q and Q must be q x k");
  }
  const double lhs = determinant(SmallMatrix::identity(p.rows()) - p * q);
  const double rhs = determinant(SmallMatrix::identity(q.rows()) - q * p);
  return std::abs(lhs - rhs);
}

std::vector<double> singular_values(const SmallMatrix& m) {
  // Orthogonalise the columns of a tall matrix; column norms are the sigmas.
  SmallMatrix a = m.rows() >= m.cols() ? m : m.transpose();
  const std::size_t rows = a.rows();
  const std::size_t n = a.cols();
  constexpr double kOffTol = 1e-14;
  constexpr int kMaxSweeps = 60;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
          alpha += a(r, i) * a(r, i);
          beta += a(r, j) * a(r, j);
          gamma += a(r, i) * a(r, j);
        }
        if (gamma == 0.0) continue;
        const double rel = std::abs(gamma) / std::sqrt(alpha * beta);
        off = std::max(off, rel);
        if (rel <= kOffTol) continue;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t r = 0; r < rows; ++r) {
          const double ai = a(r, i);
          const double aj = a(r, j);
          a(r, i) = c * ai - s * aj;
          a(r, j) = s * ai + c * aj;
        }
      }
    if (off <= kOffTol) break;
  }
  std::vector<double> sigma(n);
  for (std::size_t c = 0; c < n; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < rows; ++r) s += a(r, c) * a(r, c);
    sigma[c] = std::sqrt(s);
  }
  std::sort(sigma.begin(), sigma.end(), std::greater<>());
  return sigma;
}

std::size_t numeric_rank(const SmallMatrix& m, double rel_tol) {
  if (!(rel_tol > 0.0)) throw DomainError("numeric_rank: tolerance must be positive");
  const auto sigma = singular_values(m);
  if (sigma.empty() || sigma.front() == 0.0) return 0;
  const double cut = rel_tol * sigma.front();
  return static_cast<std::size_t>(
      std::count_if(sigma.begin(), sigma.end(), [cut](double s) { return s > cut; }));
}

JacobiResiduals jacobi_identity_residuals(const MatrixPath& path, double xi, double h) {
  if (!(h > 0.0)) throw DomainError("jacobi_identity_residuals: step must be positive");
  const SmallMatrix m = path(xi);
  require_square(m, "jacobi_identity_residuals");
  const SmallMatrix mp = path(xi + h);
  const SmallMatrix mm = path(xi - h);
  const SmallMatrix dm = (mp - mm) * (0.5 / h);
  const SmallMatrix adj = adjugate(m);
  const double tr_term = trace(adj * dm);

  JacobiResiduals out{};
  const double ddet = (determinant(mp) - determinant(mm)) / (2.0 * h);
  out.determinant = std::abs(ddet - tr_term);

  const SmallMatrix minv = inverse(m);
  const SmallMatrix dadj = (adjugate(mp) - adjugate(mm)) * (0.5 / h);
  const SmallMatrix predicted =
      (tr_term * SmallMatrix::identity(m.rows()) - adj * dm) * minv;
  out.adjugate = (dadj - predicted).max_abs();
  return out;
}

}  // namespace rinv
