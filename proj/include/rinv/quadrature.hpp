#pragma once

#include <functional>

namespace rinv {

struct QuadratureResult {
  double value;
  double error_estimate;
};

/// Adaptive 15-point Gauss-Kronrod on [a, b]. `tolerance` is relative to the
/// L1 norm of the integrand; subdivision stops at max_depth levels.
QuadratureResult integrate_gk15(const std::function<double(double)>& f, double a, double b, double tolerance,
                                unsigned max_depth = 20);

}  // namespace rinv
