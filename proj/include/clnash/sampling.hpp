#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

namespace clnash {

/// Radical inverse of `index` in `base`; the k-th coordinate of a Halton point.
inline double RadicalInverse(std::uint64_t index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

inline int HaltonBase(int dim) {
  static constexpr std::array<int, 40> kPrimes = {
      2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,
      47,  53,  59,  61,  67,  71,  73,  79,  83,  89,  97,  101, 103, 107,
      109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173};
  if (dim < 0 || dim >= static_cast<int>(kPrimes.size()))
    throw std::out_of_range("Halton sequence supports at most 40 dimensions");
  return kPrimes[dim];
}

/// Coordinate `dim` of the `index`-th Halton point in the unit cube. Index 0 is
/// skipped by callers since it maps to the corner.
inline double Halton(std::uint64_t index, int dim) { return RadicalInverse(index, HaltonBase(dim)); }

}  // namespace clnash
