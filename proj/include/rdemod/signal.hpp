#pragma once

// Discrete multitone signal model.
//
// A signal bandlimited to W Hz on [0, 1) is f(t) = sum_w a_w e^{-2 pi i w t}
// over integer frequencies w in {0, +-1, ..., +-(W/2 - 1), W/2}. The
// demodulator only ever sees the chip averages of f, which absorb a per-tone
// attenuation into the amplitudes; the attenuated amplitudes s_w are the
// recovery target (AmplitudeVector). Columns use standard DFT bin order:
// frequency w >= 0 lives in column w, negative w in column W + w.

#include <Eigen/Core>
#include <complex>
#include <cstddef>
#include <vector>

#include "rdemod/rng.hpp"

namespace rdemod {

/// Throws std::domain_error unless w is even and at least 2.
void require_bandlimit(std::size_t w);

/// DFT bin holding frequency `omega`. Throws std::domain_error when omega is
/// outside {-(W/2 - 1), ..., W/2}.
std::size_t freq_to_column(long omega, std::size_t w);

/// Inverse of freq_to_column.
long column_to_freq(std::size_t column, std::size_t w);

/// Attenuated amplitudes s, indexed by column. This is what the sampling
/// matrix acts on.
struct AmplitudeVector {
  Eigen::VectorXcd coeffs;

  static AmplitudeVector zeros(std::size_t w) { return {Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(w))}; }
  std::size_t w() const { return static_cast<std::size_t>(coeffs.size()); }
  std::vector<std::size_t> support() const;
  std::size_t sparsity() const { return support().size(); }
};

/// Continuous-time tone amplitudes a, indexed by column.
struct ToneAmplitudes {
  Eigen::VectorXcd coeffs;
};

/// Chip-average factor for frequency omega: the integral of e^{-2 pi i omega t}
/// over [0, 1/W), i.e. (1 - e^{-2 pi i omega/W}) / (2 pi i omega), and 1/W at
/// omega = 0. Never zero for |omega| <= W/2.
std::complex<double> bracket(long omega, std::size_t w);

/// s_w = a_w * bracket(w).
AmplitudeVector attenuate(const ToneAmplitudes& a);

/// Exact inverse of attenuate.
ToneAmplitudes prewhiten(const AmplitudeVector& s);

/// f(t) = sum_w a_w e^{-2 pi i w t} with a = prewhiten(s). Requires t in [0, 1).
std::complex<double> eval_multitone(const AmplitudeVector& s, double t);

/// Random-phase model: a uniformly random K-subset of frequencies, unit
/// magnitudes, i.i.d. uniform phases. Throws std::domain_error if k > w.
AmplitudeVector draw_model_a(std::size_t w, std::size_t k, Rng& rng);

/// p-compressible vector whose sorted magnitudes are exactly k^{-1/p}, with
/// uniform phases at uniformly permuted positions. Requires p in (0, 1).
AmplitudeVector draw_compressible(std::size_t w, double p, Rng& rng);

/// True when the sorted magnitudes obey |s|_(k) <= k^{-1/p} (with a relative
/// slack of `rel_tol`).
bool is_compressible(const AmplitudeVector& s, double p, double rel_tol = 1e-12);

struct SparseApproximation {
  AmplitudeVector head;  // s_K
  double tail_l1 = 0.0;  // ||s - s_K||_1
  double tail_l2 = 0.0;  // ||s - s_K||_2
};

/// Keeps the K largest-magnitude entries; equal magnitudes go to the lower
/// column first.
SparseApproximation best_k_approx(const AmplitudeVector& s, std::size_t k);

}  // namespace rdemod
