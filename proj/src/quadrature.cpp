#include "rinv/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace rinv {

QuadratureResult integrate_gk15(const std::function<double(double)>& f, double a, double b, double tolerance,
                                unsigned max_depth) {
  if (a == b) return {0.0, 0.0};
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, max_depth, tolerance, &err);
  return {v, err};
}

}  // namespace rinv
