#include "rinv/csv.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace rinv {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv_header(std::ostream& os) { os << kCsvHeader << '\n'; }

void write_csv_row(std::ostream& os, double t, const Vec3& x, const EvaluationResult& e) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const bool ok = e.in_domain;
  const std::array<double, 12> cols{t,
                                    x[0],
                                    x[1],
                                    x[2],
                                    ok ? e.r[0] : nan,
                                    ok ? e.r[1] : nan,
                                    ok ? e.state.v[0] : nan,
                                    ok ? e.state.v[1] : nan,
                                    ok ? e.state.v[2] : nan,
                                    ok ? e.state.rho : nan,
                                    ok ? e.state.p : nan,
                                    ok ? e.detM1 : nan};
  for (double c : cols) os << format_double(c) << ',';
  os << (ok ? 1 : 0) << '\n';
}

}  // namespace rinv
