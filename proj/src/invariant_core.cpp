#include "rinv/invariant_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rinv/errors.hpp"

namespace rinv {

namespace {

constexpr double kFdRelStep = 1e-6;

double fd_step(double x) { return kFdRelStep * (1.0 + std::abs(x)); }

// 5-point central difference weights for f(x-2h), f(x-h), f(x+h), f(x+2h).
constexpr std::array<int, 4> kOffsets{-2, -1, 1, 2};
constexpr std::array<double, 4> kWeights{1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0};

void require_rank(const InvariantChart& chart) {
  const std::size_t k = chart.k();
  if (k < 1 || k > 3) throw ShapeError("invariant chart needs 1..3 wave vectors, got " + std::to_string(k));
  if (!chart.profile) throw ShapeError("invariant chart has no profile map");
}

double max_abs(const EquationVector& e) {
  double m = 0.0;
  for (double x : e) m = std::max(m, std::abs(x));
  return m;
}

template <std::size_t N>
double max_abs(const std::array<EquationVector, N>& es) {
  double m = 0.0;
  for (const auto& e : es) m = std::max(m, max_abs(e));
  return m;
}

double max_abs(const std::array<double, 4>& d) {
  double m = 0.0;
  for (double x : d) m = std::max(m, std::abs(x));
  return m;
}

struct PointData {
  FluidState u;
  SmallMatrix lambda;
  SmallMatrix df;
  std::array<SmallMatrix, 4> eta;
  std::array<SmallMatrix, 5> blocks;
  EquationVector b{};
  EquationVector scale{};
};

PointData point_data(const InvariantChart& chart, std::span<const double> r) {
  require_rank(chart);
  if (r.size() != chart.k()) throw ShapeError("invariant vector has the wrong length");
  PointData pd;
  pd.u = chart.profile(r);
  pd.lambda = lambda_matrix(chart, pd.u);
  pd.df = profile_jacobian(chart, r);
  pd.eta = eta_matrices(chart, pd.u);
  pd.blocks = coefficient_blocks(pd.u, chart.params);
  pd.b = source_B(pd.u, chart.params);
  const double fl = pd.df.norm_inf() * pd.lambda.norm_inf();
  for (std::size_t mu = 0; mu < 5; ++mu) pd.scale[mu] = 1.0 + pd.blocks[mu].norm_inf() * fl;
  return pd;
}

double det_scale(const SmallMatrix& eta_i, const SmallMatrix& df, std::size_t k) {
  return std::pow(1.0 + eta_i.norm_inf() * df.norm_inf(), static_cast<double>(k));
}

// df (eta_a df) (eta_b df) ... lambda for a sequence of indices.
SmallMatrix chain(const SmallMatrix& df, const std::array<SmallMatrix, 4>& eta, const SmallMatrix& lambda,
                  std::initializer_list<int> idx) {
  SmallMatrix acc = df;
  for (int i : idx) acc = acc * (eta[static_cast<std::size_t>(i)] * df);
  return acc * lambda;
}

}  // namespace

SmallMatrix lambda_matrix(const InvariantChart& chart, const FluidState& u) {
  const std::size_t k = chart.k();
  SmallMatrix l(k, 4);
  for (std::size_t s = 0; s < k; ++s) {
    const Covector c = chart.wave_vectors[s](u);
    for (std::size_t i = 0; i < 4; ++i) l(s, i) = c[i];
  }
  return l;
}

std::array<SmallMatrix, 4> eta_matrices(const InvariantChart& chart, const FluidState& u) {
  if (chart.eta) return chart.eta(u);
  const std::size_t k = chart.k();
  std::array<SmallMatrix, 4> eta;
  for (auto& e : eta) e = SmallMatrix(k, 5);
  const auto base = u.as_array();
  for (std::size_t alpha = 0; alpha < 5; ++alpha) {
    const double h = fd_step(base[alpha]);
    for (std::size_t n = 0; n < 4; ++n) {
      auto shifted = base;
      shifted[alpha] += kOffsets[n] * h;
      const SmallMatrix l = lambda_matrix(chart, FluidState::from_array(shifted));
      for (std::size_t s = 0; s < k; ++s)
        for (std::size_t i = 0; i < 4; ++i) eta[i](s, alpha) += kWeights[n] * l(s, i) / h;
    }
  }
  return eta;
}

SmallMatrix profile_jacobian(const InvariantChart& chart, std::span<const double> r) {
  if (chart.profile_jacobian) return chart.profile_jacobian(r);
  const std::size_t k = r.size();
  SmallMatrix df(5, k);
  std::vector<double> shifted(r.begin(), r.end());
  for (std::size_t s = 0; s < k; ++s) {
    const double h = fd_step(r[s]);
    for (std::size_t n = 0; n < 4; ++n) {
      shifted[s] = r[s] + kOffsets[n] * h;
      const auto f = chart.profile(shifted).as_array();
      for (std::size_t alpha = 0; alpha < 5; ++alpha) df(alpha, s) += kWeights[n] * f[alpha] / h;
    }
    shifted[s] = r[s];
  }
  return df;
}

std::array<SmallMatrix, 5> coefficient_blocks(const FluidState& u, const ExternalParams& params) {
  std::array<SmallMatrix, 4> a;
  for (int i = 0; i < 4; ++i) a[static_cast<std::size_t>(i)] = assemble_matrix(i, u, params);
  std::array<SmallMatrix, 5> blocks;
  for (std::size_t mu = 0; mu < 5; ++mu) {
    blocks[mu] = SmallMatrix(4, 5);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t alpha = 0; alpha < 5; ++alpha) blocks[mu](i, alpha) = a[i](mu, alpha);
  }
  return blocks;
}

double trace_form(const SmallMatrix& block, const SmallMatrix& x) {
  if (block.rows() != x.cols() || block.cols() != x.rows()) throw ShapeError("trace_form: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < block.rows(); ++i)
    for (std::size_t a = 0; a < block.cols(); ++a) s += block(i, a) * x(a, i);
  return s;
}

std::vector<double> riemann_invariants(const InvariantChart& chart, double t, const Vec3& x, const FluidState& u) {
  require_rank(chart);
  std::vector<double> r(chart.k());
  for (std::size_t s = 0; s < chart.k(); ++s) r[s] = contract(chart.wave_vectors[s](u), t, x);
  return r;
}

SymmetryBasis annihilator_basis(const InvariantChart& chart, const FluidState& u) {
  require_rank(chart);
  const SmallMatrix l = lambda_matrix(chart, u);
  const std::size_t k = chart.k();
  if (numeric_rank(l) < k) throw DomainError("annihilator_basis: wave covectors are linearly dependent");

  std::vector<Covector> q;
  auto project_out = [&q](Covector v) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& e : q) {
        double d = 0.0;
        for (std::size_t i = 0; i < 4; ++i) d += v[i] * e[i];
        for (std::size_t i = 0; i < 4; ++i) v[i] -= d * e[i];
      }
    }
    return v;
  };
  auto normalise = [](Covector v) {
    double n = 0.0;
    for (double c : v) n += c * c;
    n = std::sqrt(n);
    for (double& c : v) c /= n;
    return v;
  };
  for (std::size_t s = 0; s < k; ++s) q.push_back(normalise(project_out({l(s, 0), l(s, 1), l(s, 2), l(s, 3)})));

  SymmetryBasis basis;
  while (q.size() < 4) {
    // Greedy choice of the coordinate axis with the largest orthogonal residual.
    Covector best{};
    double best_norm = -1.0;
    for (std::size_t j = 0; j < 4; ++j) {
      Covector e{};
      e[j] = 1.0;
      const Covector res = project_out(e);
      double n = 0.0;
      for (double c : res) n += c * c;
      if (n > best_norm) {
        best_norm = n;
        best = res;
      }
    }
    const Covector xi = normalise(best);
    q.push_back(xi);
    basis.xi.push_back(xi);
  }
  return basis;
}

SmallMatrix m1_matrix(const InvariantChart& chart, double t, const Vec3& x, const FluidState& u) {
  const auto r = riemann_invariants(chart, t, x, u);
  const SmallMatrix df = profile_jacobian(chart, r);
  const auto eta = eta_matrices(chart, u);
  const SmallMatrix p = t * eta[0] + x[0] * eta[1] + x[1] * eta[2] + x[2] * eta[3];
  return SmallMatrix::identity(chart.k()) - p * df;
}

double m1_determinant(const InvariantChart& chart, double t, const Vec3& x, const FluidState& u) {
  return determinant(m1_matrix(chart, t, x, u));
}

GradientResult gradient_du(const InvariantChart& chart, double t, const Vec3& x, const FluidState& u,
                           double threshold) {
  const auto r = riemann_invariants(chart, t, x, u);
  const SmallMatrix df = profile_jacobian(chart, r);
  const auto eta = eta_matrices(chart, u);
  const SmallMatrix p = t * eta[0] + x[0] * eta[1] + x[1] * eta[2] + x[2] * eta[3];
  const SmallMatrix m1 = SmallMatrix::identity(chart.k()) - p * df;
  const SmallMatrix m2 = SmallMatrix::identity(5) - df * p;

  GradientResult out;
  out.det_m1 = determinant(m1);
  out.det_m2 = determinant(m2);
  out.wa_gap = std::abs(out.det_m1 - out.det_m2);
  if (!(std::abs(out.det_m1) >= threshold)) {
    throw CatastropheError("gradient_du: |det M1| below singularity threshold", out.det_m1);
  }
  out.du = df * adjugate(m1) * lambda_matrix(chart, u) * (1.0 / out.det_m1);
  return out;
}

double Rank2Residuals::max_a() const { return max_abs(a); }
double Rank2Residuals::max_b() const { return max_abs(b); }
double Rank2Residuals::max_c_offdiag() const { return max_abs(c_offdiag); }
double Rank2Residuals::max_c_diag() const { return max_abs(c_diag); }
double Rank2Residuals::max_d() const { return max_abs(d); }
double Rank2Residuals::max_all() const {
  return std::max({max_a(), max_b(), max_c_offdiag(), max_d()});
}

Rank2Residuals rank2_condition_residuals(const InvariantChart& chart, std::span<const double> r) {
  if (chart.k() != 2) throw ShapeError("rank2_condition_residuals: chart rank is not 2");
  const PointData pd = point_data(chart, r);
  Rank2Residuals res;
  const SmallMatrix x0 = pd.df * pd.lambda;
  std::array<SmallMatrix, 4> x1;
  for (int i = 0; i < 4; ++i) x1[static_cast<std::size_t>(i)] = chain(pd.df, pd.eta, pd.lambda, {i});

  for (std::size_t mu = 0; mu < 5; ++mu) {
    const double s = pd.scale[mu];
    res.a[mu] = (trace_form(pd.blocks[mu], x0) - pd.b[mu]) / s;
    for (std::size_t i = 0; i < 4; ++i) res.b[i][mu] = trace_form(pd.blocks[mu], x1[i]) / s;
    std::size_t pair = 0;
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j, ++pair) {
        const double sym = trace_form(pd.blocks[mu], chain(pd.df, pd.eta, pd.lambda, {i, j})) +
                           trace_form(pd.blocks[mu], chain(pd.df, pd.eta, pd.lambda, {j, i}));
        res.c_offdiag[pair][mu] = sym / s;
      }
      res.c_diag[static_cast<std::size_t>(i)][mu] =
          trace_form(pd.blocks[mu], chain(pd.df, pd.eta, pd.lambda, {i, i})) / s;
    }
  }
  for (std::size_t i = 0; i < 4; ++i) res.d[i] = determinant(pd.eta[i] * pd.df) / det_scale(pd.eta[i], pd.df, 2);
  return res;
}

double Rank3Residuals::max_a() const { return max_abs(a); }
double Rank3Residuals::max_b() const { return max_abs(b); }
double Rank3Residuals::max_c() const { return max_abs(c); }
double Rank3Residuals::max_d() const {
  double m = 0.0;
  for (const auto& e : d) m = std::max(m, max_abs(e));
  return m;
}
double Rank3Residuals::max_e() const { return max_abs(e); }
double Rank3Residuals::max_all() const { return std::max({max_a(), max_b(), max_c(), max_d(), max_e()}); }

double six_term_trace(const SmallMatrix& block, const SmallMatrix& df, const std::array<SmallMatrix, 4>& eta,
                      const SmallMatrix& lambda, IndexTriple idx) {
  const std::array<int, 3> v{idx.i1, idx.i2, idx.i3};
  // Permutations of positions, so repeated indices still contribute six terms.
  static constexpr std::array<std::array<int, 3>, 6> kPerms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  double s = 0.0;
  for (const auto& p : kPerms) {
    s += trace_form(block, chain(df, eta, lambda,
                                 {v[static_cast<std::size_t>(p[0])], v[static_cast<std::size_t>(p[1])],
                                  v[static_cast<std::size_t>(p[2])]}));
  }
  return s;
}

Rank3Residuals rank3_condition_residuals(const InvariantChart& chart, std::span<const double> r) {
  if (chart.k() != 3) throw ShapeError("rank3_condition_residuals: chart rank is not 3");
  const PointData pd = point_data(chart, r);
  Rank3Residuals res;
  for (int i1 = 0; i1 < 4; ++i1)
    for (int i2 = i1; i2 < 4; ++i2)
      for (int i3 = i2; i3 < 4; ++i3)
        if (!(i1 == i2 && i2 == i3)) res.d_indices.push_back({i1, i2, i3});
  res.d.assign(res.d_indices.size(), EquationVector{});

  const SmallMatrix x0 = pd.df * pd.lambda;
  for (std::size_t mu = 0; mu < 5; ++mu) {
    const double s = pd.scale[mu];
    res.a[mu] = (trace_form(pd.blocks[mu], x0) - pd.b[mu]) / s;
    for (int i = 0; i < 4; ++i)
      res.b[static_cast<std::size_t>(i)][mu] = trace_form(pd.blocks[mu], chain(pd.df, pd.eta, pd.lambda, {i})) / s;
    std::size_t pair = 0;
    for (int i = 0; i < 4; ++i) {
      for (int j = i; j < 4; ++j, ++pair) {
        double sym = trace_form(pd.blocks[mu], chain(pd.df, pd.eta, pd.lambda, {i, j}));
        if (i != j) sym += trace_form(pd.blocks[mu], chain(pd.df, pd.eta, pd.lambda, {j, i}));
        res.c[pair][mu] = sym / s;
      }
    }
    for (std::size_t n = 0; n < res.d_indices.size(); ++n)
      res.d[n][mu] = six_term_trace(pd.blocks[mu], pd.df, pd.eta, pd.lambda, res.d_indices[n]) / s;
  }
  for (std::size_t i = 0; i < 4; ++i) res.e[i] = determinant(pd.eta[i] * pd.df) / det_scale(pd.eta[i], pd.df, 3);
  return res;
}

ContractionSides cayley_hamilton_contraction(const SmallMatrix& block, const SmallMatrix& df,
                                             const SmallMatrix& eta_i, const SmallMatrix& lambda) {
  const SmallMatrix n = eta_i * df;
  const std::size_t k = n.rows();
  if (k != 2 && k != 3) throw ShapeError("cayley_hamilton_contraction: rank must be 2 or 3");
  std::array<double, 4> tk{};
  SmallMatrix power = SmallMatrix::identity(k);
  for (std::size_t p = 0; p <= k; ++p) {
    tk[p] = trace_form(block, df * power * lambda);
    power = power * n;
  }
  const double trn = trace(n);
  const double dn = determinant(n);
  if (k == 2) return {tk[2] - trn * tk[1], -dn * tk[0]};
  const double e2 = 0.5 * (trn * trn - trace(n * n));
  return {tk[3] - trn * tk[2] + e2 * tk[1], dn * tk[0]};
}

EquationVector trace_poly_residual(const InvariantChart& chart, double t, const Vec3& x, const FluidState& u) {
  const auto r = riemann_invariants(chart, t, x, u);
  const SmallMatrix df = profile_jacobian(chart, r);
  const SmallMatrix m1 = m1_matrix(chart, t, x, u);
  const double det = determinant(m1);
  const SmallMatrix core = df * adjugate(m1) * lambda_matrix(chart, u);
  const auto blocks = coefficient_blocks(u, chart.params);
  const auto b = source_B(u, chart.params);
  EquationVector out{};
  for (std::size_t mu = 0; mu < 5; ++mu) out[mu] = trace_form(blocks[mu], core) - det * b[mu];
  return out;
}

}  // namespace rinv
