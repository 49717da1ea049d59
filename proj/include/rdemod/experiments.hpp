#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "rdemod/recover.hpp"

namespace rdemod {

enum class Solver { irls, bpdn, cosamp, l0 };

/// Throws std::domain_error for an unknown name.
Solver parse_solver(std::string_view name);
std::string_view to_string(Solver solver);

/// Dispatches to the named solver. bpdn uses config.eta; cosamp and l0 use k.
RecoveryResult solve(Solver solver, const DemodulatorSystem& system, const SampleVector& y,
                     std::size_t k, const SolverConfig& config);

struct TrialOutcome {
  bool success = false;
  double relative_error = 0.0;
  RecoveryResult result;
};

/// One Monte-Carlo trial: a fresh chipping sequence, then a fresh model-A
/// signal, both from `rng`; noiseless acquisition and recovery.
TrialOutcome run_recovery_trial(std::size_t w, std::size_t k, std::size_t r, Rng& rng,
                                Solver solver = Solver::irls, const SolverConfig& config = {});

struct RateProbe {
  std::size_t r = 0;
  std::size_t trials_run = 0;
  std::size_t successes = 0;
  bool passed = false;
};

struct MinRateResult {
  std::size_t w = 0;
  std::size_t k = 0;
  std::optional<std::size_t> r_min;  // empty when no R <= W reaches the target
  std::vector<RateProbe> probes;
};

struct MinRateConfig {
  std::size_t trials = 100;
  double target_success = 0.99;
  std::uint64_t seed = 0;
  Solver solver = Solver::irls;
  SolverConfig solver_config;
};

/// Least R whose empirical success rate reaches the target. Scans R upward in
/// steps of max(1, W/128), then walks the last coarse gap one unit at a time.
/// Trial t at rate R uses the stream (seed, "minrate", W, K, R, t); a rate is
/// abandoned as soon as it can no longer reach the target.
/// Throws std::domain_error if trials < 20 or the target is outside (0, 1).
MinRateResult min_rate_search(std::size_t w, std::size_t k, const MinRateConfig& config);

struct RatePoint {
  double k = 0.0;
  double w = 0.0;
  double r = 0.0;
};

/// R = slope * K ln(W/K + 1) + intercept.
struct RegressionFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;  // r_i - fitted_i
};

double rate_law_regressor(double k, double w);

/// Ordinary least squares. Throws std::domain_error with fewer than three
/// points or when every regressor value is the same.
RegressionFit fit_rate_law(const std::vector<RatePoint>& points);

struct GridCell {
  std::size_t k = 0;
  std::size_t r = 0;
  std::size_t successes = 0;
  bool skipped = false;  // K > R, or R > W
};

struct GridConfig {
  std::size_t w = 512;
  std::vector<std::size_t> k_values;
  std::vector<std::size_t> r_values;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  Solver solver = Solver::irls;
  SolverConfig solver_config;
  std::size_t threads = 1;
};

struct TrialGrid {
  std::size_t w = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<GridCell> cells;  // K-major, in config order

  const GridCell& at(std::size_t k, std::size_t r) const;
  double success_rate(const GridCell& cell) const;
};

/// Trial t of cell (K, R) uses the stream (seed, "grid", W, K, R, t), so the
/// counts do not depend on `threads`.
TrialGrid success_grid(const GridConfig& config);

struct AmConfig {
  std::size_t w = 1024;
  std::size_t r = 128;
  std::size_t message_k = 4;  // nonzero Fourier coefficients of m(t); even
  long carrier = 200;
  long bandwidth = 32;       // message tones lie in [-bandwidth, bandwidth]
  double amplitude = 1.0;    // A
  double offset = 1.0;       // C
  double noise_level = 0.0;  // ||noise|| / ||Phi s||
  std::uint64_t seed = 0;
  SolverConfig solver_config;
};

struct AmResult {
  double snr_db = 0.0;
  std::vector<long> message_freqs;
  Eigen::VectorXcd message;        // b_nu at message_freqs
  Eigen::VectorXcd reconstructed;  // estimates at message_freqs
  double residual_error = 0.0;     // energy recovered outside message_freqs
  bool converged = false;
};

/// Synthetic f(t) = A cos(2 pi w_c t) (m(t) + C) with a real K-tone message,
/// acquired by a random demodulator with optional additive noise, recovered,
/// and coherently demodulated. SNR compares the demodulated message with m
/// over every frequency 0 < |nu| <= bandwidth and is capped at 300 dB.
/// Throws std::domain_error if K is odd, K/2 > bandwidth, w_c <= bandwidth or
/// w_c + bandwidth > W/2 - 1.
AmResult am_demo(const AmConfig& config);

/// (SNR - 1.76) / 6.02.
double enob(double snr_db);

/// 2^(ENOB - 1) W / P(1.7 K ln(W/K)). Throws std::domain_error if the power
/// function is not positive there.
double fom(double enob_bits, double w, const std::function<double(double)>& p_diss, double k);

/// 2^(ENOB - 1) W / P(W).
double fom_conventional(double enob_bits, double w, const std::function<double(double)>& p_diss);

/// Runs `body(i)` for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace rdemod
