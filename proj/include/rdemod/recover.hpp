#pragma once

#include <cstddef>
#include <vector>

#include "rdemod/demodulator.hpp"
#include "rdemod/signal.hpp"

namespace rdemod {

struct SolverConfig {
  std::size_t max_iters = 2000;
  // Budget per penalized IRLS run inside l1_denoise.
  std::size_t penalized_max_iters = 5000;
  // IRLS smoothing: eps_0 = eps_initial, eps_{t+1} = max(eps_t * eps_decay, eps_floor).
  double eps_initial = 1.0;
  double eps_decay = 0.1;
  double eps_floor = 1e-8;
  // IRLS stops once eps is at the floor and ||v_{t+1} - v_t|| <= tolerance * ||v_{t+1}||.
  double tolerance = 1e-9;
  // Noise radius for the noise-aware program.
  double eta = 0.0;
  // CoSaMP halts after `stagnation_window` consecutive residual improvements
  // below stagnation_tol * ||y||.
  std::size_t stagnation_window = 3;
  double stagnation_tol = 1e-6;
  // l0 oracle refuses when sum_k C(W, k) k^3 exceeds this.
  double l0_budget = 5e7;
  bool record_trace = false;

  /// Throws std::domain_error on nonpositive tolerances or a decay outside (0, 1).
  void validate() const;
};

/// One IRLS reweighting step. With weights fixed, the step minimizes
/// sum |v_i|^2 / d_i over the feasible set, so objective_after <= objective_before
/// whenever the previous iterate was feasible.
struct IrlsStep {
  double epsilon = 0.0;
  double objective_before = 0.0;
  double objective_after = 0.0;
  double step_norm = 0.0;
};

struct RecoveryResult {
  AmplitudeVector estimate;
  std::size_t iterations = 0;
  double residual_l2 = 0.0;  // ||Phi estimate - y||_2
  bool converged = false;
  std::vector<IrlsStep> trace;  // filled when SolverConfig::record_trace
};

/// ||Phi v - y||_2 through the fast operator.
double residual_norm(const DemodulatorSystem& system, const AmplitudeVector& v,
                     const SampleVector& y);

/// ||estimate - truth||_2 / ||truth||_2 (absolute error when truth is zero).
double relative_error(const AmplitudeVector& estimate, const AmplitudeVector& truth);

/// Exact-recovery test used by every experiment: relative l2 error <= tol.
bool recovered(const AmplitudeVector& estimate, const AmplitudeVector& truth, double tol = 1e-6);

/// min ||v||_1 subject to Phi v = y, by iteratively reweighted least squares.
/// Each step solves (Phi D Phi^*) z = y and sets v = D Phi^* z with
/// D = diag(sqrt(|v_i|^2 + eps^2)). The final iterate is refit by least squares
/// on its numerical support when that raises neither l1 norm nor residual. Non-convergence is reported through
/// RecoveryResult::converged, not an exception.
RecoveryResult irls_l1(const DemodulatorSystem& system, const SampleVector& y,
                       const SolverConfig& config = {});

/// min ||v||_1 subject to ||Phi v - y||_2 <= eta. Runs IRLS on the penalized
/// form v = D Phi^* (Phi D Phi^* + lambda I)^{-1} y and bisects lambda until
/// the residual lands in [0.95 eta, eta]. eta = 0 is irls_l1.
RecoveryResult l1_denoise(const DemodulatorSystem& system, const SampleVector& y, double eta,
                          const SolverConfig& config = {});

/// CoSaMP: merge the 2K largest proxy entries with the current support, least
/// squares on the union, prune to K. Throws std::domain_error unless
/// 1 <= K <= R/2.
RecoveryResult cosamp(const DemodulatorSystem& system, const SampleVector& y, std::size_t k,
                      const SolverConfig& config = {});

struct L0Result {
  RecoveryResult result;
  std::vector<std::size_t> support;
  // Number of supports of the winning size that reproduce y. A value of 1
  // means the sparsest solution is unique.
  std::size_t feasible_supports = 0;
};

/// Exhaustive search for the sparsest v with Phi v = y over supports of size
/// 1..k_max (least squares per support, residual < 1e-8 max(1, ||y||)).
/// Ties go to the smaller residual, then the lexicographically smaller support.
/// Throws rdemod::BudgetExceeded when the search would exceed l0_budget.
L0Result l0_oracle(const DemodulatorSystem& system, const SampleVector& y, std::size_t k_max,
                   const SolverConfig& config = {});

}  // namespace rdemod
