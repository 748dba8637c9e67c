#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace rinv {

using SpaceTimePoint = std::array<double, 4>;  // (t, x, y, z)

struct SampleSpec {
  SpaceTimePoint lo{0.0, 0.0, 0.0, 0.0};
  SpaceTimePoint hi{1.0, 1.0, 1.0, 1.0};
  std::size_t count = 100;
  std::uint64_t seed = 1;
};

/// Halton points in bases 2, 3, 5, 7 with a Cranley-Patterson shift drawn
/// from mt19937_64(seed), mapped to the box [lo, hi]. Bit-for-bit
/// reproducible for a given spec.
std::vector<SpaceTimePoint> halton_points(const SampleSpec& spec);

/// Radical inverse of n in the given base.
double radical_inverse(std::uint64_t n, unsigned base);

}  // namespace rinv
