#include "rinv/sampling.hpp"

#include <cmath>
#include <random>

#include "rinv/errors.hpp"

namespace rinv {

double radical_inverse(std::uint64_t n, unsigned base) {
  const double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (n > 0) {
    r += static_cast<double>(n % base) * f;
    n /= base;
    f *= inv;
  }
  return r;
}

std::vector<SpaceTimePoint> halton_points(const SampleSpec& spec) {
  for (std::size_t d = 0; d < 4; ++d)
    if (!(spec.hi[d] >= spec.lo[d])) throw ConfigError("sample box has hi < lo");

  // Raw 53-bit draws, independent of the std distribution implementations.
  std::mt19937_64 rng(spec.seed);
  std::array<double, 4> shift{};
  for (double& s : shift) s = static_cast<double>(rng() >> 11) * 0x1.0p-53;

  static constexpr std::array<unsigned, 4> kBases{2, 3, 5, 7};
  std::vector<SpaceTimePoint> pts(spec.count);
  for (std::size_t n = 0; n < spec.count; ++n) {
    for (std::size_t d = 0; d < 4; ++d) {
      double u = radical_inverse(n + 1, kBases[d]) + shift[d];
      if (u >= 1.0) u -= 1.0;
      pts[n][d] = spec.lo[d] + u * (spec.hi[d] - spec.lo[d]);
    }
  }
  return pts;
}

}  // namespace rinv
