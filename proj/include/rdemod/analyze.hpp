#pragma once

// Empirical matrix diagnostics for a drawn Phi: entry size, column norms,
// coherence, local cumulative coherence, conditioning of column submatrices,
// and restricted-isometry constants. All of these need the dense matrix and
// are refused above kDenseLimit.

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "rdemod/demodulator.hpp"

namespace rdemod {

/// X = Phi^* Phi - I.
struct GramDeviation {
  Eigen::MatrixXcd x;
  double max_abs = 0.0;           // max |x_ij| over all entries
  double max_off_diagonal = 0.0;  // coherence mu
  double max_diagonal = 0.0;      // max_w | ||phi_w||^2 - 1 |
};

GramDeviation gram_deviation(const DemodulatorSystem& system);
GramDeviation gram_deviation(const Eigen::MatrixXcd& phi);

/// max |phi_rw|.
double max_entry(const DemodulatorSystem& system);

/// mu = max_{a != w} |<phi_a, phi_w>|.
double coherence(const DemodulatorSystem& system);
double coherence(const GramDeviation& gram);

/// mu_2(Omega) = max_{a not in Omega} (sum_{w in Omega} |<phi_a, phi_w>|^2)^{1/2}.
/// Throws std::domain_error if Omega has repeated or out-of-range indices or
/// covers every column.
double cumulative_coherence(const DemodulatorSystem& system, std::span<const std::size_t> support);
double cumulative_coherence(const GramDeviation& gram, std::span<const std::size_t> support);

/// || Phi_Omega^* Phi_Omega - I || (spectral). Throws std::domain_error when
/// |Omega| > R or indices are invalid.
double submatrix_condition(const DemodulatorSystem& system, std::span<const std::size_t> support);
double submatrix_condition(const GramDeviation& gram, std::span<const std::size_t> support);

enum class RipMethod { exhaustive, sampled };
std::string_view to_string(RipMethod method);

struct RipEstimate {
  std::size_t order = 0;
  double delta_hat = 0.0;
  std::size_t supports_tested = 0;
  // sampled results are lower bounds on delta_N.
  RipMethod method = RipMethod::exhaustive;
};

/// delta_N = max over |Omega| = n of ||(Phi^* Phi - I)_{Omega x Omega}||.
/// Exhaustive when C(W, n) <= budget; otherwise the maximum over `budget`
/// supports drawn from the stream derived from `seed`.
RipEstimate rip_estimate(const DemodulatorSystem& system, std::size_t n, std::size_t budget,
                         std::uint64_t seed = 0);
RipEstimate rip_estimate(const GramDeviation& gram, std::size_t n, std::size_t budget,
                         std::uint64_t seed = 0);

/// Average of Phi^* Phi over all 2^W chipping sequences. Throws
/// std::domain_error for W > 20.
Eigen::MatrixXcd mean_gram_exhaustive(std::size_t w, std::size_t r);

/// Uniform random K-subset of [0, W), sorted.
std::vector<std::size_t> random_support(std::size_t w, std::size_t k, Rng& rng);

}  // namespace rdemod
