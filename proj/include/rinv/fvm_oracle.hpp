#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "rinv/errors.hpp"
#include "rinv/euler_model.hpp"
#include "rinv/solutions.hpp"

namespace rinv {

/// Uniform periodic node grid: node (i, j, k) sits at lo + (i, j, k) h with
/// h = (hi - lo) / n per axis.
struct GridSpec {
  std::array<std::size_t, 3> n{16, 16, 16};
  Vec3 lo{0.0, 0.0, 0.0};
  Vec3 hi{1.0, 1.0, 1.0};

  double spacing(std::size_t axis) const { return (hi[axis] - lo[axis]) / static_cast<double>(n[axis]); }
  Vec3 node(std::size_t i, std::size_t j, std::size_t k) const;
  std::size_t size() const { return n[0] * n[1] * n[2]; }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return (i * n[1] + j) * n[2] + k; }
};

struct GridField {
  GridSpec grid;
  double t = 0.0;
  /// v1, v2, v3, rho, p at every node, row-major over (i, j, k).
  std::array<std::vector<double>, 5> q;

  explicit GridField(const GridSpec& g = {});
  FluidState at(std::size_t idx) const;
  void set(std::size_t idx, const FluidState& u);
};

/// Integration aborted: CFL bound, NaN, or loss of positivity.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, std::size_t step) : Error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

struct IntegrateOptions {
  /// Fourth-difference hyperviscosity coefficient (term -nu h^3 D4 u).
  double nu = 0.05;
  /// dt must not exceed cfl * h_min / max wave speed.
  double cfl = 0.25;
};

/// Largest |v| + sqrt(kappa p / rho) over the nodes.
double max_wave_speed(const GridField& f, const ExternalParams& params);

/// Exact solution sampled on the grid at time t. Throws DomainError when a
/// node is out of the solution's domain.
GridField sample_exact(const SolutionInstance& inst, const GridSpec& grid, double t);

/// Classic RK4 on u_t = (A^0)^-1 (B - A^i u_i) with second-order central
/// differences, hyperviscosity and periodic boundaries.
GridField integrate(const GridField& initial, const ExternalParams& params, double dt, std::size_t steps,
                    const IntegrateOptions& opts = {});

struct FieldErrors {
  std::array<double, 5> linf{};
  std::array<double, 5> l2{};
  std::size_t nodes = 0;
  double max_linf() const;
};

/// Per-field discrepancy against the exact solution at numeric.t over
/// nodes at least `margin` cells from every face. Throws DomainError when the
/// margin leaves no nodes.
FieldErrors compare(const SolutionInstance& exact, const GridField& numeric, std::size_t margin);

/// Same, over the nodes inside the physical box [lo, hi].
FieldErrors compare_box(const SolutionInstance& exact, const GridField& numeric, const Vec3& lo, const Vec3& hi);

/// ceil(steps dt speed / h): cells reached by the physical domain of dependence.
std::size_t minimum_margin(double dt, std::size_t steps, double speed, double h);

}  // namespace rinv
