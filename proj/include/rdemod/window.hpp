#pragma once

// Windowed acquisition of nonharmonic tones. A tone e^{-2 pi i w' t} with
// w' not an integer is not sparse in the harmonic basis on [0, 1); its best
// K-term error decays like K^{-1/2}. Multiplying by a smooth window that
// vanishes to high order at the ends restores fast decay.
//
// The family used here is psi_n(t) = S_n(sin^2(pi t)) on [0, 1], where
// S_n(x) = x^{n+1} sum_{j<=n} C(n+j, j) (1-x)^j is the smoothstep polynomial.
// S_n(x) + S_n(1 - x) = 1, so half-period shifts of psi_n sum to one, and
// psi_n vanishes to order 2n+2 at both ends, giving a windowed tone whose
// harmonic coefficients fall off like |k|^{-(2n+3)}.

#include <cstddef>
#include <vector>

namespace rdemod {

/// Smallest member of the family whose windowed tones decay at least like
/// |k|^{-order}. Throws std::domain_error for order < 1.
std::size_t window_degree(std::size_t order);

/// psi_n(t); zero outside [0, 1].
double window_value(double t, std::size_t degree);

/// sum over integer j of psi_n(t - j/2).
double window_partition_sum(double t, std::size_t degree);

struct WindowRow {
  std::size_t k = 0;
  double err_raw = 0.0;       // relative l2 error of the best K-term approximation
  double err_windowed = 0.0;
};

struct WindowResult {
  double omega_prime = 0.0;
  std::size_t order = 0;
  std::size_t degree = 0;
  std::vector<WindowRow> rows;
  double slope_raw = 0.0;  // least-squares slope of log err against log K
  double slope_windowed = 0.0;
};

struct WindowConfig {
  double omega_prime = 100.37;
  std::size_t order = 2;
  std::vector<std::size_t> k_values{4, 8, 16, 32, 64};
  std::size_t samples = 16384;  // FFT length for the windowed coefficients
};

/// Raw coefficients come from the closed form
/// |c_k| = |sin(pi (w' - k))| / (pi |w' - k|); windowed ones from an FFT of
/// the sampled product. Throws std::domain_error if w' is an integer, order
/// is 0, a K is 0, or fewer than two K values are given.
WindowResult window_demo(const WindowConfig& config);

}  // namespace rdemod
