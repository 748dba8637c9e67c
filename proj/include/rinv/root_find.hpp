#pragma once

#include <functional>
#include <string>
#include <utility>
#include <algorithm>

#include "rinv/errors.hpp"

namespace rinv {

struct RootOptions {
  int max_iterations = 100;
  /// Convergence when |g(r)| <= residual_tol (1 + |r|).
  double residual_tol = 1e-12;
  /// Below this |g'| a Newton step is replaced by bisection.
  double min_slope = 1e-14;
  /// Doublings of the bracket half-width allowed while looking for a sign change.
  int max_expansions = 12;
};

/// Root-finding failure with the state at the moment it gave up.
class RootFindError : public Error {
 public:
  RootFindError(const std::string& what, double best, double lo, double hi, int iterations)
      : Error(what), best_(best), lo_(lo), hi_(hi), iterations_(iterations) {}
  double best() const { return best_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  int iterations() const { return iterations_; }

 private:
  double best_, lo_, hi_;
  int iterations_;
};

struct RootResult {
  double root;
  int iterations;
  double residual;
};

/// Safeguarded Newton iteration on a bracket. The bracket is grown
/// symmetrically about the seed until g changes sign (throws
/// "root not bracketed" after max_expansions); Newton steps that leave the
/// bracket or meet a flat slope fall back to bisection ("no convergence"
/// after max_iterations).
RootResult implicit_solve(const std::function<double(double)>& g, const std::function<double(double)>& g_prime,
                          double seed, std::pair<double, double> bracket, const RootOptions& opts = {});

}  // namespace rinv
