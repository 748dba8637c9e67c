#include "rinv/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rinv {

Field field_of(const SolutionInstance& inst) {
  return [inst](double t, const Vec3& x) -> std::optional<FluidState> {
    const auto e = evaluate(inst, t, x);
    if (!e.in_domain) return std::nullopt;
    return e.state;
  };
}

double default_fd_step(double coordinate) { return 1e-5 * (1.0 + std::abs(coordinate)); }

FdPartials fd_partials(const Field& field, double t, const Vec3& x, double h) {
  FdPartials out;
  const SpaceTimePoint base{t, x[0], x[1], x[2]};
  auto at = [&](std::size_t axis, double offset) {
    SpaceTimePoint p = base;
    p[axis] += offset;
    return field(p[0], {p[1], p[2], p[3]});
  };
  const auto centre = field(t, x);
  for (std::size_t axis = 0; axis < 4; ++axis) {
    const double step = h > 0.0 ? h : default_fd_step(base[axis]);
    const auto up = at(axis, step);
    const auto dn = at(axis, -step);
    std::array<double, 5> d{};
    if (up && dn) {
      const auto a = up->as_array(), b = dn->as_array();
      for (std::size_t k = 0; k < 5; ++k) d[k] = (a[k] - b[k]) / (2.0 * step);
    } else if (centre && (up || dn)) {
      out.one_sided = true;
      const auto c = centre->as_array();
      const auto o = (up ? *up : *dn).as_array();
      const double sgn = up ? 1.0 : -1.0;
      for (std::size_t k = 0; k < 5; ++k) d[k] = sgn * (o[k] - c[k]) / step;
    } else {
      out.ok = false;
      return out;
    }
    for (std::size_t k = 0; k < 5; ++k) out.du(k, axis) = d[k];
  }
  return out;
}

namespace {

// A^0 u_t + A^i u_i - B, and the normalisation 1 + ||A|| ||du|| + ||B||.
std::pair<EquationVector, double> raw_residual(const FluidState& u, const SmallMatrix& du,
                                               const ExternalParams& params) {
  EquationVector res{};
  const auto b = source_B(u, params);
  double a_norm = 0.0;
  for (int i = 0; i < 4; ++i) {
    const SmallMatrix a = assemble_matrix(i, u, params);
    a_norm = std::max(a_norm, a.norm_inf());
    for (std::size_t r = 0; r < 5; ++r)
      for (std::size_t c = 0; c < 5; ++c) res[r] += a(r, c) * du(c, static_cast<std::size_t>(i));
  }
  double b_norm = 0.0;
  for (std::size_t r = 0; r < 5; ++r) {
    res[r] -= b[r];
    b_norm = std::max(b_norm, std::abs(b[r]));
  }
  return {res, 1.0 + a_norm * du.max_abs() + b_norm};
}

}  // namespace

std::optional<EquationVector> pde_residual(const Field& field, const ExternalParams& params, double t,
                                           const Vec3& x, double h) {
  const auto u = field(t, x);
  if (!u) return std::nullopt;
  const auto fd = fd_partials(field, t, x, h);
  if (!fd.ok) return std::nullopt;
  auto [res, scale] = raw_residual(*u, fd.du, params);
  for (double& r : res) r = std::abs(r) / scale;
  return res;
}

double ResidualReport::max_residual() const { return *std::max_element(eq_max.begin(), eq_max.end()); }

double ResidualReport::audit_max() const { return std::max({audit_a, audit_b, audit_c_offdiag, audit_d}); }

double ResidualReport::rank2_fraction() const {
  return in_domain == 0 ? 0.0 : static_cast<double>(rank_histogram[2]) / static_cast<double>(in_domain);
}

std::string ResidualReport::status() const {
  return verified() ? "verified" : "unverified: possible transcription issue";
}

ResidualReport residual_report(const SolutionInstance& inst, const SampleSpec& spec, const Tolerances& tol) {
  ResidualReport rep;
  rep.family = std::string(to_string(inst.family));
  rep.tolerances = tol;
  const auto pts = halton_points(spec);
  const Field field = field_of(inst);
  const InvariantChart chart = as_chart(inst);
  rep.samples = pts.size();
  rep.min_abs_det_m1 = std::numeric_limits<double>::infinity();
  EquationVector sumsq{};
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (const auto& p : pts) {
    SampleRow row;
    row.point = p;
    row.residual.fill(nan);
    const Vec3 x{p[1], p[2], p[3]};
    row.eval = evaluate(inst, p[0], x);
    if (!row.eval.in_domain) {
      ++rep.out_of_domain;
      rep.rows.push_back(row);
      continue;
    }
    const auto fd = fd_partials(field, p[0], x);
    if (!fd.ok) {
      ++rep.out_of_domain;
      row.eval.in_domain = false;
      rep.rows.push_back(row);
      continue;
    }
    ++rep.in_domain;
    row.one_sided = fd.one_sided;
    if (fd.one_sided) ++rep.one_sided;

    auto [res, scale] = raw_residual(row.eval.state, fd.du, inst.external);
    for (std::size_t k = 0; k < 5; ++k) {
      row.residual[k] = std::abs(res[k]) / scale;
      rep.eq_max[k] = std::max(rep.eq_max[k], row.residual[k]);
      sumsq[k] += row.residual[k] * row.residual[k];
    }
    row.rank = numeric_rank(fd.du, kFdRankTolerance);
    ++rep.rank_histogram[std::min<std::size_t>(row.rank, 5)];
    rep.min_abs_det_m1 = std::min(rep.min_abs_det_m1, std::abs(row.eval.detM1));

    const std::array<double, 2> r = row.eval.r;
    const auto audit = rank2_condition_residuals(chart, r);
    rep.audit_a = std::max(rep.audit_a, audit.max_a());
    rep.audit_b = std::max(rep.audit_b, audit.max_b());
    rep.audit_c_offdiag = std::max(rep.audit_c_offdiag, audit.max_c_offdiag());
    rep.audit_c_diag = std::max(rep.audit_c_diag, audit.max_c_diag());
    rep.audit_d = std::max(rep.audit_d, audit.max_d());

    const auto basis = annihilator_basis(chart, row.eval.state);
    const double du_scale = 1.0 + fd.du.max_abs();
    for (const auto& xi : basis.xi) {
      for (std::size_t a = 0; a < 5; ++a) {
        double s = 0.0;
        for (std::size_t i = 0; i < 4; ++i) s += xi[i] * fd.du(a, i);
        rep.constraint_max = std::max(rep.constraint_max, std::abs(s) / du_scale);
      }
    }
    rep.rows.push_back(row);
  }

  if (rep.in_domain > 0) {
    for (std::size_t k = 0; k < 5; ++k) rep.eq_rms[k] = std::sqrt(sumsq[k] / static_cast<double>(rep.in_domain));
  } else {
    rep.min_abs_det_m1 = 0.0;
  }
  rep.domain_too_small = 2 * rep.out_of_domain > rep.samples;
  rep.residual_pass = rep.in_domain > 0 && rep.max_residual() <= tol.residual;
  rep.rank_pass = rep.in_domain > 0 && rep.rank2_fraction() >= tol.rank_fraction;
  rep.audit_pass = rep.in_domain > 0 && rep.audit_max() <= tol.audit;
  rep.constraint_pass = rep.in_domain > 0 && rep.constraint_max <= tol.constraint;
  return rep;
}

double constraint_violation(const Field& field, const BasisProvider& basis, const std::vector<SpaceTimePoint>& pts) {
  double worst = 0.0;
  for (const auto& p : pts) {
    const Vec3 x{p[1], p[2], p[3]};
    const auto u = field(p[0], x);
    if (!u) continue;
    const auto fd = fd_partials(field, p[0], x);
    if (!fd.ok) continue;
    const double scale = 1.0 + fd.du.max_abs();
    for (const auto& xi : basis(*u).xi) {
      for (std::size_t a = 0; a < 5; ++a) {
        double s = 0.0;
        for (std::size_t i = 0; i < 4; ++i) s += xi[i] * fd.du(a, i);
        worst = std::max(worst, std::abs(s) / scale);
      }
    }
  }
  return worst;
}

double constraint_check(const SolutionInstance& inst, const SampleSpec& spec) {
  const InvariantChart chart = as_chart(inst);
  return constraint_violation(field_of(inst), [&chart](const FluidState& u) { return annihilator_basis(chart, u); },
                              halton_points(spec));
}

}  // namespace rinv
