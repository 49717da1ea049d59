#include "rdemod/experiments.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "rdemod/analyze.hpp"

namespace rdemod {

Solver parse_solver(std::string_view name) {
  if (name == "irls") return Solver::irls;
  if (name == "bpdn") return Solver::bpdn;
  if (name == "cosamp") return Solver::cosamp;
  if (name == "l0") return Solver::l0;
  throw std::domain_error("unknown solver '" + std::string(name) + "'");
}

std::string_view to_string(Solver solver) {
  switch (solver) {
    case Solver::irls: return "irls";
    case Solver::bpdn: return "bpdn";
    case Solver::cosamp: return "cosamp";
    case Solver::l0: return "l0";
  }
  return "irls";
}

RecoveryResult solve(Solver solver, const DemodulatorSystem& system, const SampleVector& y,
                     std::size_t k, const SolverConfig& config) {
  switch (solver) {
    case Solver::irls: return irls_l1(system, y, config);
    case Solver::bpdn: return l1_denoise(system, y, config.eta, config);
    case Solver::cosamp: return cosamp(system, y, k, config);
    case Solver::l0: return l0_oracle(system, y, k, config).result;
  }
  throw std::domain_error("unknown solver");
}

TrialOutcome run_recovery_trial(std::size_t w, std::size_t k, std::size_t r, Rng& rng,
                                Solver solver, const SolverConfig& config) {
  const DemodulatorSystem system(w, r, draw_chipping(w, rng));
  const AmplitudeVector s = draw_model_a(w, k, rng);
  TrialOutcome out;
  if (solver == Solver::cosamp && (k == 0 || 2 * k > r)) {
    out.relative_error = 1.0;
    out.result.estimate = AmplitudeVector::zeros(w);
    return out;
  }
  const SampleVector y = system.apply(s);
  out.result = solve(solver, system, y, k, config);
  out.relative_error = relative_error(out.result.estimate, s);
  out.success = out.relative_error <= 1e-6;
  return out;
}

MinRateResult min_rate_search(std::size_t w, std::size_t k, const MinRateConfig& config) {
  require_bandlimit(w);
  if (k > w) throw std::domain_error("min_rate_search: K exceeds W");
  if (config.trials < 20) throw std::domain_error("min_rate_search: need at least 20 trials");
  if (!(config.target_success > 0.0 && config.target_success < 1.0))
    throw std::domain_error("min_rate_search: target must lie in (0, 1)");
  config.solver_config.validate();

  const auto trials = config.trials;
  const auto needed = static_cast<std::size_t>(
      std::ceil(config.target_success * static_cast<double>(trials) - 1e-9));
  const std::size_t allowed_failures = trials - needed;

  MinRateResult out;
  out.w = w;
  out.k = k;
  auto probe = [&](std::size_t r) {
    RateProbe p;
    p.r = r;
    std::size_t failures = 0;
    for (std::size_t t = 0; t < trials && failures <= allowed_failures; ++t) {
      Rng rng = Rng::derive(config.seed, "minrate", w, k, r, t);
      const bool ok = run_recovery_trial(w, k, r, rng, config.solver, config.solver_config).success;
      ++p.trials_run;
      if (ok) {
        ++p.successes;
      } else {
        ++failures;
      }
    }
    p.passed = p.successes >= needed;
    out.probes.push_back(p);
    return p.passed;
  };

  const std::size_t step = std::max<std::size_t>(1, w / 128);
  std::size_t below = 0;
  std::optional<std::size_t> hit;
  for (std::size_t r = step;; r += step) {
    const std::size_t rr = std::min(r, w);
    if (probe(rr)) {
      hit = rr;
      break;
    }
    below = rr;
    if (rr == w) break;
  }
  if (!hit) return out;
  for (std::size_t r = below + 1; r < *hit; ++r) {
    if (probe(r)) {
      out.r_min = r;
      return out;
    }
  }
  out.r_min = hit;
  return out;
}

double rate_law_regressor(double k, double w) {
  if (k == 0.0) return 0.0;
  return k * std::log(w / k + 1.0);
}

RegressionFit fit_rate_law(const std::vector<RatePoint>& points) {
  if (points.size() < 3) throw std::domain_error("fit_rate_law: need at least 3 points");
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = points[static_cast<std::size_t>(i)];
    a(i, 0) = rate_law_regressor(p.k, p.w);
    a(i, 1) = 1.0;
    b(i) = p.r;
  }
  const double spread = a.col(0).maxCoeff() - a.col(0).minCoeff();
  if (!(spread > 1e-12 * std::max(1.0, a.col(0).cwiseAbs().maxCoeff())))
    throw std::domain_error("fit_rate_law: regressor values are all equal");
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  RegressionFit fit;
  fit.slope = coef(0);
  fit.intercept = coef(1);
  const Eigen::VectorXd res = b - a * coef;
  fit.residuals.assign(res.data(), res.data() + res.size());
  return fit;
}

const GridCell& TrialGrid::at(std::size_t k, std::size_t r) const {
  for (const auto& c : cells)
    if (c.k == k && c.r == r) return c;
  throw std::out_of_range("no grid cell for K=" + std::to_string(k) + ", R=" + std::to_string(r));
}

double TrialGrid::success_rate(const GridCell& cell) const {
  if (cell.skipped || trials == 0) return 0.0;
  return static_cast<double>(cell.successes) / static_cast<double>(trials);
}

TrialGrid success_grid(const GridConfig& config) {
  require_bandlimit(config.w);
  if (config.k_values.empty() || config.r_values.empty() || config.trials == 0)
    throw std::domain_error("success_grid: empty grid");
  config.solver_config.validate();
  TrialGrid grid;
  grid.w = config.w;
  grid.trials = config.trials;
  grid.seed = config.seed;
  for (std::size_t k : config.k_values)
    for (std::size_t r : config.r_values) grid.cells.push_back({k, r, 0, k > r || r > config.w || r == 0});

  parallel_for(grid.cells.size(), config.threads, [&](std::size_t i) {
    GridCell& cell = grid.cells[i];
    if (cell.skipped) return;
    for (std::size_t t = 0; t < config.trials; ++t) {
      Rng rng = Rng::derive(config.seed, "grid", config.w, cell.k, cell.r, t);
      if (run_recovery_trial(config.w, cell.k, cell.r, rng, config.solver, config.solver_config).success)
        ++cell.successes;
    }
  });
  return grid;
}

AmResult am_demo(const AmConfig& c) {
  require_bandlimit(c.w);
  const long half = static_cast<long>(c.w / 2);
  if (c.message_k == 0 || c.message_k % 2 != 0)
    throw std::domain_error("am_demo: message K must be even and positive");
  if (c.bandwidth < 1 || c.message_k / 2 > static_cast<std::size_t>(c.bandwidth))
    throw std::domain_error("am_demo: message band too narrow for K tones");
  if (c.carrier <= c.bandwidth || c.carrier + c.bandwidth > half - 1)
    throw std::domain_error("am_demo: carrier band must lie inside (0, W/2 - 1]");
  if (c.r < 1 || c.r > c.w) throw std::domain_error("am_demo: need 1 <= R <= W");
  if (!(c.amplitude > 0.0)) throw std::domain_error("am_demo: amplitude must be positive");
  if (!(c.noise_level >= 0.0)) throw std::domain_error("am_demo: noise level must be >= 0");
  c.solver_config.validate();

  Rng msg_rng = Rng::derive(c.seed, "am", "message");
  Rng chip_rng = Rng::derive(c.seed, "am", "chipping");
  Rng noise_rng = Rng::derive(c.seed, "am", "noise");

  AmResult out;
  const auto picks = random_support(static_cast<std::size_t>(c.bandwidth), c.message_k / 2, msg_rng);
  std::vector<std::pair<long, std::complex<double>>> tones;
  for (std::size_t p : picks) {
    const long nu = static_cast<long>(p) + 1;
    const auto b = msg_rng.unit_phase();
    tones.emplace_back(nu, b);
    tones.emplace_back(-nu, std::conj(b));
  }
  std::sort(tones.begin(), tones.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  out.message.resize(static_cast<Eigen::Index>(tones.size()));
  for (std::size_t i = 0; i < tones.size(); ++i) {
    out.message_freqs.push_back(tones[i].first);
    out.message[static_cast<Eigen::Index>(i)] = tones[i].second;
  }

  // cos(2 pi w_c t) e^{-2 pi i nu t} = (e^{-2 pi i (w_c + nu) t} + e^{-2 pi i (nu - w_c) t}) / 2
  ToneAmplitudes a{Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(c.w))};
  auto add = [&](long omega, std::complex<double> v) {
    a.coeffs[static_cast<Eigen::Index>(freq_to_column(omega, c.w))] += v;
  };
  for (const auto& [nu, b] : tones) {
    add(c.carrier + nu, 0.5 * c.amplitude * b);
    add(nu - c.carrier, 0.5 * c.amplitude * b);
  }
  add(c.carrier, 0.5 * c.amplitude * c.offset);
  add(-c.carrier, 0.5 * c.amplitude * c.offset);

  const AmplitudeVector s = attenuate(a);
  const DemodulatorSystem system(c.w, c.r, draw_chipping(c.w, chip_rng));
  SampleVector y = system.apply(s);
  RecoveryResult rec;
  if (c.noise_level > 0.0) {
    Eigen::VectorXcd z(y.coeffs.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = noise_rng.complex_normal();
    const double scale = c.noise_level * y.coeffs.norm() / z.norm();
    z *= scale;
    y.coeffs += z;
    rec = l1_denoise(system, y, z.norm(), c.solver_config);
  } else {
    rec = irls_l1(system, y, c.solver_config);
  }
  out.converged = rec.converged;
  const ToneAmplitudes ahat = prewhiten(rec.estimate);

  out.reconstructed.resize(out.message.size());
  double err = 0.0, sig = 0.0;
  for (long nu = -c.bandwidth; nu <= c.bandwidth; ++nu) {
    if (nu == 0) continue;
    const std::complex<double> est =
        (ahat.coeffs[static_cast<Eigen::Index>(freq_to_column(c.carrier + nu, c.w))] +
         ahat.coeffs[static_cast<Eigen::Index>(freq_to_column(nu - c.carrier, c.w))]) /
        c.amplitude;
    const auto it = std::find(out.message_freqs.begin(), out.message_freqs.end(), nu);
    std::complex<double> truth(0.0, 0.0);
    if (it != out.message_freqs.end()) {
      const auto idx = static_cast<Eigen::Index>(it - out.message_freqs.begin());
      truth = out.message[idx];
      out.reconstructed[idx] = est;
    } else {
      out.residual_error += std::norm(est);
    }
    err += std::norm(est - truth);
    sig += std::norm(truth);
  }
  constexpr double kSnrCap = 300.0;
  out.snr_db = err > 0.0 ? std::min(kSnrCap, 10.0 * std::log10(sig / err)) : kSnrCap;
  return out;
}

double enob(double snr_db) {
  // Compensated: the rounding error of the subtraction and of the quotient
  // are folded back in, so e.g. 61.96 dB gives exactly 10 bits.
  constexpr double kOffset = 1.76, kStep = 6.02;
  const double d = snr_db - kOffset;
  const double bb = d - snr_db;
  const double d_err = (snr_db - (d - bb)) + (-kOffset - bb);
  const double q = d / kStep;
  const double rem = std::fma(-q, kStep, d) + d_err;
  return q + rem / kStep;
}

double fom(double enob_bits, double w, const std::function<double(double)>& p_diss, double k) {
  if (!(k > 0.0) || !(w > k)) throw std::domain_error("fom: need 0 < K < W");
  const double p = p_diss(1.7 * k * std::log(w / k));
  if (!(p > 0.0)) throw std::domain_error("fom: dissipated power must be positive");
  return std::exp2(enob_bits - 1.0) * w / p;
}

double fom_conventional(double enob_bits, double w, const std::function<double(double)>& p_diss) {
  const double p = p_diss(w);
  if (!(p > 0.0)) throw std::domain_error("fom: dissipated power must be positive");
  return std::exp2(enob_bits - 1.0) * w / p;
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const std::size_t workers = std::min(threads, n);
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace rdemod
