#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>

namespace rdemod::detail {

// e^{-2 pi i k / n}. Quarter turns are returned exactly so that small
// transforms (n = 4) have dyadic entries.
inline std::complex<double> unit_root(long long k, std::size_t n) {
  const long long nn = static_cast<long long>(n);
  long long m = k % nn;
  if (m < 0) m += nn;
  if ((4 * m) % nn == 0) {
    switch ((4 * m) / nn) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, -1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, 1.0};
    }
  }
  const double angle = -2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
  return {std::cos(angle), std::sin(angle)};
}

}  // namespace rdemod::detail
