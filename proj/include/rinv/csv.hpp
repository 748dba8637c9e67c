#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>

#include "rinv/solutions.hpp"

namespace rinv {

/// t,x,y,z,r0,r1,v1,v2,v3,rho,p,detM1,in_domain
inline constexpr std::string_view kCsvHeader = "t,x,y,z,r0,r1,v1,v2,v3,rho,p,detM1,in_domain";

/// %.17g; "nan" / "inf" / "-inf" for non-finite values.
std::string format_double(double v);

void write_csv_header(std::ostream& os);
/// One data row. Out-of-domain rows carry NaN state columns.
void write_csv_row(std::ostream& os, double t, const Vec3& x, const EvaluationResult& e);

}  // namespace rinv
