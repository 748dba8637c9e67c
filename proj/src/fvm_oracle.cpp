#include "rinv/fvm_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rinv {

Vec3 GridSpec::node(std::size_t i, std::size_t j, std::size_t k) const {
  return {lo[0] + static_cast<double>(i) * spacing(0), lo[1] + static_cast<double>(j) * spacing(1),
          lo[2] + static_cast<double>(k) * spacing(2)};
}

GridField::GridField(const GridSpec& g) : grid(g) {
  for (auto& c : q) c.assign(g.size(), 0.0);
}

FluidState GridField::at(std::size_t idx) const { return {{q[0][idx], q[1][idx], q[2][idx]}, q[3][idx], q[4][idx]}; }

void GridField::set(std::size_t idx, const FluidState& u) {
  const auto a = u.as_array();
  for (std::size_t c = 0; c < 5; ++c) q[c][idx] = a[c];
}

double max_wave_speed(const GridField& f, const ExternalParams& params) {
  double s = 0.0;
  for (std::size_t idx = 0; idx < f.grid.size(); ++idx) {
    const FluidState u = f.at(idx);
    s = std::max(s, norm(u.v) + std::sqrt(sound_speed_sq(u, params)));
  }
  return s;
}

GridField sample_exact(const SolutionInstance& inst, const GridSpec& grid, double t) {
  GridField f(grid);
  f.t = t;
  for (std::size_t i = 0; i < grid.n[0]; ++i)
    for (std::size_t j = 0; j < grid.n[1]; ++j)
      for (std::size_t k = 0; k < grid.n[2]; ++k) {
        const Vec3 x = grid.node(i, j, k);
        const auto e = evaluate(inst, t, x);
        if (!e.in_domain)
          throw DomainError("sample_exact: node (" + std::to_string(i) + "," + std::to_string(j) + "," +
                            std::to_string(k) + ") out of domain: " + std::string(to_string(e.issue)));
        f.set(grid.index(i, j, k), e.state);
      }
  return f;
}

namespace {

using Fields = std::array<std::vector<double>, 5>;

void rhs(const GridSpec& g, const Fields& q, const ExternalParams& params, double nu, Fields& out) {
  const std::size_t nx = g.n[0], ny = g.n[1], nz = g.n[2];
  const std::array<double, 3> h{g.spacing(0), g.spacing(1), g.spacing(2)};
  auto wrap = [](std::size_t i, long d, std::size_t n) {
    return static_cast<std::size_t>((static_cast<long>(i) + d + 2 * static_cast<long>(n)) % static_cast<long>(n));
  };
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t k = 0; k < nz; ++k) {
        const std::size_t idx = g.index(i, j, k);
        auto neighbour = [&](std::size_t axis, long d) {
          if (axis == 0) return g.index(wrap(i, d, nx), j, k);
          if (axis == 1) return g.index(i, wrap(j, d, ny), k);
          return g.index(i, j, wrap(k, d, nz));
        };
        const FluidState u{{q[0][idx], q[1][idx], q[2][idx]}, q[3][idx], q[4][idx]};
        const auto b = source_B(u, params);
        std::array<double, 5> w = b;
        std::array<double, 5> visc{};
        for (std::size_t axis = 0; axis < 3; ++axis) {
          const std::size_t m2 = neighbour(axis, -2), m1 = neighbour(axis, -1);
          const std::size_t p1 = neighbour(axis, 1), p2 = neighbour(axis, 2);
          std::array<double, 5> du{};
          for (std::size_t c = 0; c < 5; ++c) {
            du[c] = (q[c][p1] - q[c][m1]) / (2.0 * h[axis]);
            const double d4 = q[c][m2] - 4.0 * q[c][m1] + 6.0 * q[c][idx] - 4.0 * q[c][p1] + q[c][p2];
            visc[c] -= nu * d4 / h[axis];
          }
          const SmallMatrix a = assemble_matrix(static_cast<int>(axis) + 1, u, params);
          for (std::size_t r = 0; r < 5; ++r)
            for (std::size_t c = 0; c < 5; ++c) w[r] -= a(r, c) * du[c];
        }
        // (A^0)^-1 is the identity with +kappa p / rho in entry (5, 4).
        w[4] += params.kappa * u.p / u.rho * w[3];
        for (std::size_t c = 0; c < 5; ++c) out[c][idx] = w[c] + visc[c];
      }
}

void axpy(Fields& y, const Fields& x, const Fields& k, double a) {
  for (std::size_t c = 0; c < 5; ++c)
    for (std::size_t n = 0; n < y[c].size(); ++n) y[c][n] = x[c][n] + a * k[c][n];
}

void check_state(const Fields& q, std::size_t step) {
  for (std::size_t n = 0; n < q[0].size(); ++n) {
    for (std::size_t c = 0; c < 5; ++c)
      if (!std::isfinite(q[c][n])) throw IntegrationError("integrate: non-finite value at step " +
                                                          std::to_string(step), step);
    if (!(q[3][n] > 0.0) || !(q[4][n] > 0.0))
      throw IntegrationError("integrate: rho or p lost positivity at step " + std::to_string(step), step);
  }
}

}  // namespace

GridField integrate(const GridField& initial, const ExternalParams& params, double dt, std::size_t steps,
                    const IntegrateOptions& opts) {
  const GridSpec& g = initial.grid;
  for (std::size_t a = 0; a < 3; ++a)
    if (g.n[a] < 5) throw DomainError("integrate: each axis needs at least 5 nodes");
  check_state(initial.q, 0);
  const double h_min = std::min({g.spacing(0), g.spacing(1), g.spacing(2)});
  const double speed = max_wave_speed(initial, params);
  if (!(dt > 0.0) || dt > opts.cfl * h_min / speed) {
    throw IntegrationError("integrate: CFL violated, dt = " + std::to_string(dt) + " > " +
                               std::to_string(opts.cfl * h_min / speed),
                           0);
  }

  GridField cur = initial;
  Fields k1 = cur.q, k2 = cur.q, k3 = cur.q, k4 = cur.q, tmp = cur.q;
  for (std::size_t s = 1; s <= steps; ++s) {
    rhs(g, cur.q, params, opts.nu, k1);
    axpy(tmp, cur.q, k1, 0.5 * dt);
    rhs(g, tmp, params, opts.nu, k2);
    axpy(tmp, cur.q, k2, 0.5 * dt);
    rhs(g, tmp, params, opts.nu, k3);
    axpy(tmp, cur.q, k3, dt);
    rhs(g, tmp, params, opts.nu, k4);
    for (std::size_t c = 0; c < 5; ++c)
      for (std::size_t n = 0; n < cur.q[c].size(); ++n)
        cur.q[c][n] += dt / 6.0 * (k1[c][n] + 2.0 * k2[c][n] + 2.0 * k3[c][n] + k4[c][n]);
    check_state(cur.q, s);
  }
  cur.t = initial.t + static_cast<double>(steps) * dt;
  return cur;
}

double FieldErrors::max_linf() const { return *std::max_element(linf.begin(), linf.end()); }

namespace {

template <class Keep>
FieldErrors compare_nodes(const SolutionInstance& exact, const GridField& numeric, Keep&& keep) {
  FieldErrors err;
  const GridSpec& g = numeric.grid;
  std::array<double, 5> sumsq{};
  for (std::size_t i = 0; i < g.n[0]; ++i)
    for (std::size_t j = 0; j < g.n[1]; ++j)
      for (std::size_t k = 0; k < g.n[2]; ++k) {
        if (!keep(i, j, k)) continue;
        const auto e = evaluate(exact, numeric.t, g.node(i, j, k));
        if (!e.in_domain) throw DomainError("compare: exact solution out of domain at a compared node");
        const auto ex = e.state.as_array();
        const std::size_t idx = g.index(i, j, k);
        for (std::size_t c = 0; c < 5; ++c) {
          const double d = std::abs(numeric.q[c][idx] - ex[c]);
          err.linf[c] = std::max(err.linf[c], d);
          sumsq[c] += d * d;
        }
        ++err.nodes;
      }
  if (err.nodes == 0) throw DomainError("compare: interior margin leaves no nodes");
  for (std::size_t c = 0; c < 5; ++c) err.l2[c] = std::sqrt(sumsq[c] / static_cast<double>(err.nodes));
  return err;
}

}  // namespace

FieldErrors compare(const SolutionInstance& exact, const GridField& numeric, std::size_t margin) {
  const GridSpec& g = numeric.grid;
  for (std::size_t a = 0; a < 3; ++a)
    if (2 * margin >= g.n[a]) throw DomainError("compare: interior margin consumes the whole grid");
  return compare_nodes(exact, numeric, [&](std::size_t i, std::size_t j, std::size_t k) {
    const std::array<std::size_t, 3> id{i, j, k};
    for (std::size_t a = 0; a < 3; ++a)
      if (id[a] < margin || id[a] + margin >= g.n[a]) return false;
    return true;
  });
}

FieldErrors compare_box(const SolutionInstance& exact, const GridField& numeric, const Vec3& lo, const Vec3& hi) {
  const GridSpec& g = numeric.grid;
  return compare_nodes(exact, numeric, [&](std::size_t i, std::size_t j, std::size_t k) {
    const Vec3 x = g.node(i, j, k);
    for (std::size_t a = 0; a < 3; ++a) {
      const double slack = 1e-9 * g.spacing(a);
      if (x[a] < lo[a] - slack || x[a] > hi[a] + slack) return false;
    }
    return true;
  });
}

std::size_t minimum_margin(double dt, std::size_t steps, double speed, double h) {
  return static_cast<std::size_t>(std::ceil(static_cast<double>(steps) * dt * speed / h));
}

}  // namespace rinv
