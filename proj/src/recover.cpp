#include "rdemod/recover.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

#include "rdemod/errors.hpp"
#include "rdemod/simd/kernels.hpp"

namespace rdemod {

void SolverConfig::validate() const {
  if (max_iters == 0 || penalized_max_iters == 0) throw std::domain_error("max_iters must be positive");
  if (!(eps_initial > 0.0) || !(eps_floor > 0.0) || eps_floor > eps_initial)
    throw std::domain_error("IRLS smoothing needs 0 < eps_floor <= eps_initial");
  if (!(eps_decay > 0.0 && eps_decay < 1.0)) throw std::domain_error("eps_decay must lie in (0, 1)");
  if (!(tolerance > 0.0)) throw std::domain_error("tolerance must be positive");
  if (eta < 0.0) throw std::domain_error("eta must be nonnegative");
  if (stagnation_window == 0 || !(stagnation_tol > 0.0))
    throw std::domain_error("stagnation criterion must be positive");
  if (!(l0_budget > 0.0)) throw std::domain_error("l0_budget must be positive");
}

double residual_norm(const DemodulatorSystem& system, const AmplitudeVector& v,
                     const SampleVector& y) {
  return (system.forward(v.coeffs) - y.coeffs).norm();
}

double relative_error(const AmplitudeVector& estimate, const AmplitudeVector& truth) {
  if (estimate.w() != truth.w()) throw std::domain_error("relative_error: length mismatch");
  const double diff = (estimate.coeffs - truth.coeffs).norm();
  const double ref = truth.coeffs.norm();
  return ref > 0.0 ? diff / ref : diff;
}

bool recovered(const AmplitudeVector& estimate, const AmplitudeVector& truth, double tol) {
  return relative_error(estimate, truth) <= tol;
}

namespace {

void check_samples(const DemodulatorSystem& system, const SampleVector& y) {
  if (static_cast<std::size_t>(y.coeffs.size()) != system.r())
    throw std::domain_error("sample vector has length " + std::to_string(y.coeffs.size()) +
                            ", system expects R=" + std::to_string(system.r()));
}

RecoveryResult zero_result(const DemodulatorSystem& system, const SampleVector& y,
                           std::size_t iterations) {
  RecoveryResult out;
  out.estimate = AmplitudeVector::zeros(system.w());
  out.iterations = iterations;
  out.residual_l2 = y.coeffs.norm();
  out.converged = true;
  return out;
}

struct IrlsRun {
  Eigen::VectorXcd v;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<IrlsStep> trace;
};

// IRLS on min sum_i sqrt(|v_i|^2 + eps^2) subject to Phi v = y (lambda = 0),
// or its Tikhonov-penalized relaxation (lambda > 0).
// A warm start begins at eps_floor from the given iterate.
IrlsRun irls_core(const Eigen::MatrixXcd& phi, const Eigen::VectorXcd& y, double lambda,
                  const SolverConfig& cfg, const Eigen::VectorXcd* warm = nullptr) {
  const Eigen::Index rows = phi.rows(), w = phi.cols();
  const std::size_t wn = static_cast<std::size_t>(w);
  Eigen::VectorXd d = Eigen::VectorXd::Ones(w);
  Eigen::VectorXd sqrt_d(w);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(w);
  Eigen::VectorXcd v_next(w);
  Eigen::MatrixXcd scaled(rows, w);
  Eigen::MatrixXcd gram(rows, rows);
  double eps = cfg.eps_initial;
  if (warm) {
    v = *warm;
    eps = cfg.eps_floor;
    simd::smoothed_magnitude({v.data(), wn}, eps, {d.data(), wn});
  }
  const std::size_t max_iters = lambda > 0.0 ? cfg.penalized_max_iters : cfg.max_iters;

  IrlsRun run;
  for (std::size_t it = 1; it <= max_iters; ++it) {
    // gram = Phi D Phi^* (+ lambda I), lower triangle only.
    sqrt_d = d.cwiseSqrt();
    scaled = phi * sqrt_d.asDiagonal();
    gram.setZero();
    gram.selfadjointView<Eigen::Lower>().rankUpdate(scaled);
    if (lambda > 0.0) gram.diagonal().array() += lambda;

    Eigen::VectorXcd z;
    Eigen::LLT<Eigen::MatrixXcd, Eigen::Lower> llt(gram);
    if (llt.info() == Eigen::Success) {
      z = llt.solve(y);
    } else {
      z = gram.selfadjointView<Eigen::Lower>().ldlt().solve(y);
    }
    const Eigen::VectorXcd back = phi.adjoint() * z;
    simd::real_scale({d.data(), wn}, {back.data(), wn}, {v_next.data(), wn});

    const double step = (v_next - v).norm();
    if (cfg.record_trace && it > 1) {
      run.trace.push_back({eps, simd::weighted_energy({v.data(), wn}, {d.data(), wn}),
                           simd::weighted_energy({v_next.data(), wn}, {d.data(), wn}), step});
    }
    v.swap(v_next);
    run.iterations = it;
    if (eps <= cfg.eps_floor && step <= cfg.tolerance * v.norm()) {
      run.converged = true;
      break;
    }
    eps = std::max(eps * cfg.eps_decay, cfg.eps_floor);
    simd::smoothed_magnitude({v.data(), wn}, eps, {d.data(), wn});
  }
  run.v = std::move(v);
  return run;
}

// Least-squares refit on the numerical support of v. Kept only when it does
// not raise the l1 norm or the residual.
void polish(const Eigen::MatrixXcd& phi, const Eigen::VectorXcd& y, Eigen::VectorXcd& v) {
  const double peak = v.cwiseAbs().maxCoeff();
  if (!(peak > 0.0)) return;
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > 1e-6 * peak) support.push_back(i);
  if (support.size() > static_cast<std::size_t>(phi.rows())) return;

  Eigen::MatrixXcd sub(phi.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = phi.col(support[j]);
  const Eigen::VectorXcd u = sub.colPivHouseholderQr().solve(y);
  Eigen::VectorXcd refit = Eigen::VectorXcd::Zero(v.size());
  for (std::size_t j = 0; j < support.size(); ++j) refit[support[j]] = u[static_cast<Eigen::Index>(j)];

  const double res_v = (phi * v - y).norm();
  const double res_refit = (sub * u - y).norm();
  if (res_refit <= res_v + 1e-12 * y.norm() && refit.cwiseAbs().sum() <= v.cwiseAbs().sum()) v = std::move(refit);
}

RecoveryResult finish(const DemodulatorSystem& system, const SampleVector& y, IrlsRun run) {
  RecoveryResult out;
  out.estimate = AmplitudeVector{std::move(run.v)};
  out.iterations = run.iterations;
  out.converged = run.converged;
  out.trace = std::move(run.trace);
  out.residual_l2 = residual_norm(system, out.estimate, y);
  return out;
}

}  // namespace

RecoveryResult irls_l1(const DemodulatorSystem& system, const SampleVector& y,
                       const SolverConfig& config) {
  config.validate();
  check_samples(system, y);
  if (y.coeffs.norm() == 0.0) return zero_result(system, y, 1);
  const Eigen::MatrixXcd phi = system.dense();
  IrlsRun run = irls_core(phi, y.coeffs, 0.0, config);
  polish(phi, y.coeffs, run.v);
  return finish(system, y, std::move(run));
}

RecoveryResult l1_denoise(const DemodulatorSystem& system, const SampleVector& y, double eta,
                          const SolverConfig& config) {
  config.validate();
  check_samples(system, y);
  if (!(eta >= 0.0)) throw std::domain_error("l1_denoise: eta must be nonnegative");
  if (eta == 0.0) return irls_l1(system, y, config);
  const double y_norm = y.coeffs.norm();
  if (y_norm <= eta) return zero_result(system, y, 0);

  const Eigen::MatrixXcd phi = system.dense();
  std::size_t total_iters = 0;
  std::optional<Eigen::VectorXcd> last;
  auto evaluate = [&](double lambda) {
    IrlsRun run = irls_core(phi, y.coeffs, lambda, config, last ? &*last : nullptr);
    total_iters += run.iterations;
    last = run.v;
    const double res = (phi * run.v - y.coeffs).norm();
    return std::pair{std::move(run), res};
  };
  auto in_window = [&](double res) { return res >= 0.95 * eta && res <= eta; };

  // The penalized residual grows monotonically with lambda: bracket the
  // target window, then bisect on log(lambda).
  constexpr int kMaxEvaluations = 80;
  double lo = 0.0, hi = 0.0;  // residual(lo) < 0.95 eta, residual(hi) > eta
  std::optional<IrlsRun> best;  // feasible run with the largest residual
  double best_res = -1.0;
  auto keep_if_feasible = [&](IrlsRun& run, double res) {
    if (res <= eta && res > best_res) {
      best_res = res;
      best = std::move(run);
    }
  };

  double lambda = eta * eta / y_norm;
  int evals = 0;
  while (evals < kMaxEvaluations) {
    auto [run, res] = evaluate(lambda);
    ++evals;
    if (in_window(res)) {
      RecoveryResult out = finish(system, y, std::move(run));
      out.iterations = total_iters;
      return out;
    }
    keep_if_feasible(run, res);
    if (res > eta) {
      hi = lambda;
    } else {
      lo = lambda;
    }
    if (lo > 0.0 && hi > 0.0) break;
    lambda = hi > 0.0 ? lambda / 10.0 : lambda * 10.0;
    if (lambda < 1e-300 || lambda > 1e300) break;
  }
  while (lo > 0.0 && hi > 0.0 && evals < kMaxEvaluations) {
    const double mid = std::sqrt(lo * hi);
    auto [run, res] = evaluate(mid);
    ++evals;
    if (in_window(res)) {
      RecoveryResult out = finish(system, y, std::move(run));
      out.iterations = total_iters;
      return out;
    }
    keep_if_feasible(run, res);
    (res > eta ? hi : lo) = mid;
  }

  RecoveryResult out = best ? finish(system, y, std::move(*best)) : zero_result(system, y, 0);
  out.iterations = total_iters;
  out.converged = false;
  return out;
}

namespace {

// Indices of the `count` largest magnitudes, ties to the lower index.
std::vector<std::size_t> largest(const Eigen::VectorXcd& v, std::size_t count) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(v.size()));
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  count = std::min(count, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double ma = std::abs(v[static_cast<Eigen::Index>(a)]);
                      const double mb = std::abs(v[static_cast<Eigen::Index>(b)]);
                      return ma > mb || (ma == mb && a < b);
                    });
  idx.resize(count);
  return idx;
}

}  // namespace

RecoveryResult cosamp(const DemodulatorSystem& system, const SampleVector& y, std::size_t k,
                      const SolverConfig& config) {
  config.validate();
  check_samples(system, y);
  if (k < 1 || 2 * k > system.r())
    throw std::domain_error("cosamp: need 1 <= K <= R/2 (K=" + std::to_string(k) +
                            ", R=" + std::to_string(system.r()) + ")");
  const double y_norm = y.coeffs.norm();
  if (y_norm == 0.0) return zero_result(system, y, 0);

  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(system.w()));
  std::vector<std::size_t> support;
  Eigen::VectorXcd residual = y.coeffs;
  double prev = y_norm;
  std::size_t stagnant = 0;

  RecoveryResult out;
  for (std::size_t it = 1; it <= config.max_iters; ++it) {
    out.iterations = it;
    const Eigen::VectorXcd proxy = system.adjoint(residual);
    std::vector<std::size_t> merged = largest(proxy, 2 * k);
    merged.insert(merged.end(), support.begin(), support.end());
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

    const Eigen::MatrixXcd sub = system.columns(merged);
    const Eigen::VectorXcd b = sub.completeOrthogonalDecomposition().solve(y.coeffs);
    Eigen::VectorXcd spread = Eigen::VectorXcd::Zero(a.size());
    for (std::size_t i = 0; i < merged.size(); ++i)
      spread[static_cast<Eigen::Index>(merged[i])] = b[static_cast<Eigen::Index>(i)];

    support = largest(spread, k);
    std::sort(support.begin(), support.end());
    a.setZero();
    for (std::size_t c : support) a[static_cast<Eigen::Index>(c)] = spread[static_cast<Eigen::Index>(c)];

    residual = y.coeffs - system.forward(a);
    const double res = residual.norm();
    if (res <= config.tolerance * y_norm) {
      out.converged = true;
      break;
    }
    stagnant = (prev - res < config.stagnation_tol * y_norm) ? stagnant + 1 : 0;
    prev = res;
    if (stagnant >= config.stagnation_window) {
      out.converged = true;
      break;
    }
  }
  out.estimate = AmplitudeVector{std::move(a)};
  out.residual_l2 = residual_norm(system, out.estimate, y);
  return out;
}

namespace {

double binomial(std::size_t n, std::size_t k) {
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i)
    c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return c;
}

// Advances `comb` to the next k-subset of [0, n) in lexicographic order.
bool next_combination(std::vector<std::size_t>& comb, std::size_t n) {
  const std::size_t k = comb.size();
  for (std::size_t i = k; i-- > 0;) {
    if (comb[i] < n - k + i) {
      ++comb[i];
      for (std::size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

L0Result l0_oracle(const DemodulatorSystem& system, const SampleVector& y, std::size_t k_max,
                   const SolverConfig& config) {
  config.validate();
  check_samples(system, y);
  const std::size_t w = system.w();
  if (k_max > system.r()) throw std::domain_error("l0_oracle: k_max exceeds R");

  double cost = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double kk = static_cast<double>(k);
    cost += binomial(w, k) * kk * kk * kk;
  }
  if (cost > config.l0_budget)
    throw BudgetExceeded("l0_oracle: search cost " + std::to_string(cost) + " exceeds budget " +
                         std::to_string(config.l0_budget));

  L0Result out;
  const double y_norm = y.coeffs.norm();
  if (y_norm == 0.0) {
    out.result = zero_result(system, y, 0);
    out.feasible_supports = 1;
    return out;
  }

  const Eigen::MatrixXcd phi = w <= kDenseLimit ? system.dense() : Eigen::MatrixXcd();
  const double accept = 1e-8 * std::max(1.0, y_norm);
  std::vector<std::size_t> best_support;
  Eigen::VectorXcd best_coef;
  double best_res = std::numeric_limits<double>::infinity();
  std::size_t searched = 0;

  for (std::size_t k = 1; k <= k_max; ++k) {
    std::vector<std::size_t> comb(k);
    std::iota(comb.begin(), comb.end(), std::size_t{0});
    std::size_t feasible = 0;
    std::vector<std::size_t> level_support;
    Eigen::VectorXcd level_coef;
    double level_res = std::numeric_limits<double>::infinity();
    do {
      Eigen::MatrixXcd sub(static_cast<Eigen::Index>(system.r()), static_cast<Eigen::Index>(k));
      for (std::size_t i = 0; i < k; ++i)
        sub.col(static_cast<Eigen::Index>(i)) =
            phi.size() ? Eigen::VectorXcd(phi.col(static_cast<Eigen::Index>(comb[i]))) : system.column(comb[i]);
      const Eigen::VectorXcd coef = sub.colPivHouseholderQr().solve(y.coeffs);
      const double res = (sub * coef - y.coeffs).norm();
      ++searched;
      if (res < accept) ++feasible;
      if (res < level_res) {
        level_res = res;
        level_support = comb;
        level_coef = coef;
      }
    } while (next_combination(comb, w));

    if (level_res < best_res) {
      best_res = level_res;
      best_support = level_support;
      best_coef = level_coef;
    }
    if (feasible > 0) {
      out.feasible_supports = feasible;
      out.result.converged = true;
      break;
    }
  }

  AmplitudeVector est = AmplitudeVector::zeros(w);
  for (std::size_t i = 0; i < best_support.size(); ++i)
    est.coeffs[static_cast<Eigen::Index>(best_support[i])] = best_coef[static_cast<Eigen::Index>(i)];
  out.result.estimate = std::move(est);
  out.result.iterations = searched;
  out.result.residual_l2 = residual_norm(system, out.result.estimate, y);
  out.support = std::move(best_support);
  return out;
}

}  // namespace rdemod
