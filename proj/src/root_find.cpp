#include "rinv/root_find.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace rinv {

namespace {

bool converged(double gv, double r, const RootOptions& opts) {
  return std::abs(gv) <= opts.residual_tol * (1.0 + std::abs(r));
}

}  // namespace

RootResult implicit_solve(const std::function<double(double)>& g, const std::function<double(double)>& g_prime,
                          double seed, std::pair<double, double> bracket, const RootOptions& opts) {
  double lo = std::min(bracket.first, bracket.second);
  double hi = std::max(bracket.first, bracket.second);
  if (!(seed >= lo && seed <= hi)) seed = 0.5 * (lo + hi);

  double g_seed = g(seed);
  if (converged(g_seed, seed, opts)) return {seed, 0, g_seed};

  double glo = g(lo);
  double ghi = g(hi);
  int expansions = 0;
  while (!(glo * ghi <= 0.0)) {
    if (expansions == opts.max_expansions || !std::isfinite(glo) || !std::isfinite(ghi)) {
      throw RootFindError("implicit_solve: root not bracketed", seed, lo, hi, 0);
    }
    const double half = hi - lo;
    lo = seed - half;
    hi = seed + half;
    glo = g(lo);
    ghi = g(hi);
    ++expansions;
  }
  if (glo == 0.0) return {lo, 0, 0.0};
  if (ghi == 0.0) return {hi, 0, 0.0};
  // Orient so that g(lo) < 0 < g(hi).
  const bool flip = glo > 0.0;
  auto signed_g = [&](double r) { return flip ? -g(r) : g(r); };

  double r = seed;
  double gr = flip ? -g_seed : g_seed;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    if (gr < 0.0) lo = r;
    else hi = r;

    const double slope = flip ? -g_prime(r) : g_prime(r);
    double next = 0.0;
    bool newton_ok = std::isfinite(slope) && std::abs(slope) >= opts.min_slope;
    if (newton_ok) {
      next = r - gr / slope;
      newton_ok = next > lo && next < hi;
    }
    if (!newton_ok) next = 0.5 * (lo + hi);

    r = next;
    gr = signed_g(r);
    if (converged(gr, r, opts)) return {r, it, flip ? -gr : gr};
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(r))) {
      throw RootFindError("implicit_solve: no convergence (bracket collapsed, |g| = " + std::to_string(std::abs(gr)) +
                              ")",
                          r, lo, hi, it);
    }
  }
  throw RootFindError("implicit_solve: no convergence", r, lo, hi, opts.max_iterations);
}

}  // namespace rinv
