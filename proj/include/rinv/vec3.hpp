#pragma once

#include <array>
#include <cmath>

namespace rinv {

using Vec3 = std::array<double, 3>;
/// (lambda_0, lambda_1, lambda_2, lambda_3), contracted against (t, x, y, z).
using Covector = std::array<double, 4>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline double contract(const Covector& l, double t, const Vec3& x) {
  return l[0] * t + l[1] * x[0] + l[2] * x[1] + l[3] * x[2];
}

}  // namespace rinv
