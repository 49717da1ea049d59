// Acceptance suite. Each criterion prints one line:
//   [PASS] name: measured values
//   [FAIL] name: measured values
// Measured constants are printed even when only a functional form is asserted.
// Exit status is the number of failed criteria (capped at 1).

#include <unistd.h>

#include <Eigen/SVD>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rdemod/analyze.hpp"
#include "rdemod/cli.hpp"
#include "rdemod/experiments.hpp"
#include "rdemod/io.hpp"
#include "rdemod/window.hpp"

using namespace rdemod;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

DemodulatorSystem draw_system(std::size_t w, std::size_t r, Rng& rng) {
  return DemodulatorSystem(w, r, draw_chipping(w, rng));
}

// ---- rate laws ----

Verdict rate_law() {
  MinRateConfig cfg;
  cfg.trials = 100;
  cfg.target_success = 0.99;
  cfg.seed = 2008;
  std::vector<RatePoint> pts;
  std::string detail = "R_min";
  for (std::size_t k : {1u, 2u, 4u, 8u, 16u}) {
    const MinRateResult res = min_rate_search(512, k, cfg);
    if (!res.r_min) return {false, "no rate reached the target for K=" + std::to_string(k)};
    pts.push_back({double(k), 512.0, double(*res.r_min)});
    detail += " K=" + std::to_string(k) + ":" + std::to_string(*res.r_min);
  }
  const RegressionFit fit = fit_rate_law(pts);
  detail += "; fit R = " + fmt(fit.slope) + " K ln(W/K+1) + " + fmt(fit.intercept);
  return {fit.slope >= 1.2 && fit.slope <= 2.3, detail + " (slope band [1.2, 2.3])"};
}

Verdict logarithmic_growth() {
  MinRateConfig cfg;
  cfg.trials = 100;
  cfg.target_success = 0.99;
  cfg.seed = 2009;
  std::vector<RatePoint> pts;
  std::string detail = "K=5 R_min";
  for (std::size_t w : {128u, 256u, 512u, 1024u}) {
    const MinRateResult res = min_rate_search(w, 5, cfg);
    if (!res.r_min) return {false, "no rate reached the target for W=" + std::to_string(w)};
    pts.push_back({5.0, double(w), double(*res.r_min)});
    detail += " W=" + std::to_string(w) + ":" + std::to_string(*res.r_min);
  }
  const double ratio = pts.back().r / pts.front().r;
  const RegressionFit fit = fit_rate_law(pts);
  detail += "; ratio " + fmt(ratio) + " (<= 1.8); fit slope " + fmt(fit.slope) + ", intercept " + fmt(fit.intercept);
  return {ratio <= 1.8, detail};
}

Verdict phase_grid_spots() {
  GridConfig cfg;
  cfg.w = 512;
  cfg.trials = 100;
  cfg.seed = 2010;
  cfg.k_values = {5};
  cfg.r_values = {64};
  const TrialGrid easy = success_grid(cfg);
  cfg.k_values = {32};
  cfg.r_values = {40};
  const TrialGrid hard = success_grid(cfg);
  const double p_easy = easy.success_rate(easy.cells[0]);
  const double p_hard = hard.success_rate(hard.cells[0]);
  return {p_easy >= 0.97 && p_hard <= 0.15,
          "(K=5,R=64) " + fmt(p_easy) + " >= 0.97; (K=32,R=40) " + fmt(p_hard) + " <= 0.15"};
}

// ---- solvers ----

Verdict oracle_equivalence() {
  int unique = 0, matched = 0, mismatched_unique = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    Rng rng = Rng::derive(2011, "oracle", t);
    const DemodulatorSystem sys = draw_system(16, 8, rng);
    const AmplitudeVector s = draw_model_a(16, 2, rng);
    const SampleVector y = sys.apply(s);
    const L0Result oracle = l0_oracle(sys, y, 2);
    const bool planted_unique = oracle.support == s.support() && oracle.feasible_supports == 1;
    if (!planted_unique) continue;
    ++unique;
    const RecoveryResult l1 = irls_l1(sys, y);
    const double diff = (l1.estimate.coeffs - oracle.result.estimate.coeffs).norm() / s.coeffs.norm();
    if (l1.converged && diff <= 1e-6) {
      ++matched;
    } else {
      ++mismatched_unique;
    }
  }
  return {matched >= 95, std::to_string(matched) + "/100 matched (>= 95); planted support uniquely sparsest in " +
                             std::to_string(unique) + ", l1 differed on " + std::to_string(mismatched_unique)};
}

// ---- matrix identities ----

Verdict matrix_identities() {
  Rng rng = Rng::derive(2012, "identities");
  double worst_norm = 0.0, worst_fast = 0.0, worst_adj = 0.0;
  const std::size_t widths[] = {4, 8, 12, 16, 30, 64, 128, 256};
  for (std::size_t w : widths) {
    for (std::size_t r = 1; r <= w; ++r) {
      if (w > 64 && r % 8 != 0 && w % r != 0) continue;
      const DemodulatorSystem sys = draw_system(w, r, rng);
      const Eigen::MatrixXcd phi = sys.dense();
      if (w % r == 0) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(phi);
        worst_norm = std::max(worst_norm, std::abs(svd.singularValues()(0) - std::sqrt(double(w) / double(r))));
      }
      for (int t = 0; t < 5; ++t) {
        Eigen::VectorXcd s(static_cast<Eigen::Index>(w)), z(static_cast<Eigen::Index>(r));
        for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = rng.complex_normal();
        for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.complex_normal();
        const Eigen::VectorXcd fast = sys.forward(s), slow = phi * s;
        worst_fast = std::max(worst_fast, (fast - slow).norm() / std::max(1e-300, slow.norm()));
        const std::complex<double> lhs = fast.dot(z), rhs = s.dot(sys.adjoint(z));
        worst_adj = std::max(worst_adj, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
      }
    }
  }
  const Eigen::MatrixXcd mean = mean_gram_exhaustive(4, 2);
  const bool exact_identity = mean == Eigen::MatrixXcd::Identity(4, 4);
  return {worst_norm <= 1e-9 && worst_fast <= 1e-10 && worst_adj <= 1e-10 && exact_identity,
          "| ||Phi|| - sqrt(W/R) | max " + fmt(worst_norm) + " (<= 1e-9); fast vs dense " + fmt(worst_fast) +
              " (<= 1e-10); adjoint " + fmt(worst_adj) + " (<= 1e-10); mean Gram W=4,R=2 " +
              (exact_identity ? "== I" : "!= I")};
}

Verdict continuous_model() {
  double worst = 0.0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    Rng rng = Rng::derive(2013, "continuous", t);
    const auto eps = draw_chipping(64, rng);
    const AmplitudeVector s = draw_model_a(64, 4, rng);
    const SampleVector a = sample_continuous(s, eps, 16);
    const SampleVector b = DemodulatorSystem(64, 16, eps).apply(s);
    worst = std::max(worst, (a.coeffs - b.coeffs).norm());
  }
  return {worst <= 1e-8, "max ||closed form - matrix path|| " + fmt(worst) + " (<= 1e-8)"};
}

// ---- appendix statistics ----

Verdict appendix_statistics() {
  const std::size_t w = 512, draws = 500;
  const double entry_bound = std::sqrt(10.0 * std::log(double(w)) / 128.0);
  std::size_t entry_violations = 0, conditioned = 0, mu2_violations = 0, mu2_small = 0;
  double worst_entry_ratio = 0.0;
  for (std::size_t d = 0; d < draws; ++d) {
    Rng rng = Rng::derive(2014, "appendix", d);
    const DemodulatorSystem narrow = draw_system(w, 128, rng);
    const double entry = max_entry(narrow);
    worst_entry_ratio = std::max(worst_entry_ratio, entry / entry_bound);
    if (entry > entry_bound) ++entry_violations;

    const DemodulatorSystem wide = draw_system(w, 256, rng);
    const GramDeviation g = gram_deviation(wide);
    const auto support = random_support(w, 8, rng);
    if (submatrix_condition(g, support) < 0.5) ++conditioned;
    const double mu2 = cumulative_coherence(g, support);
    if (!(mu2 <= coherence(g) * std::sqrt(8.0))) ++mu2_violations;
    if (mu2 < 1.0 / std::sqrt(16.0 * std::log(double(w)))) ++mu2_small;
  }
  const double entry_freq = double(entry_violations) / draws;
  const double cond_rate = double(conditioned) / draws;
  const bool pass = entry_freq <= 2.0 / w && cond_rate >= 0.95 && mu2_violations == 0;
  return {pass, "entry bound exceeded " + fmt(entry_freq) + " (<= " + fmt(2.0 / w) + ", max/bound " +
                    fmt(worst_entry_ratio) + "); ||Phi_O^*Phi_O - I|| < 0.5 in " + fmt(cond_rate) +
                    " (>= 0.95); mu2 <= mu sqrt|O| violated " + std::to_string(mu2_violations) +
                    " times (== 0); mu2 < (16 ln W)^-1/2 in " + fmt(double(mu2_small) / draws) + " [recorded]"};
}

// ---- stability ----

Verdict stability() {
  std::vector<double> ratios;
  for (std::uint64_t t = 0; t < 50; ++t) {
    Rng rng = Rng::derive(2015, "noise", t);
    const DemodulatorSystem sys = draw_system(256, 64, rng);
    const AmplitudeVector s = draw_model_a(256, 5, rng);
    SampleVector y = sys.apply(s);
    Eigen::VectorXcd z(y.coeffs.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.complex_normal();
    z *= 0.01 * y.coeffs.norm() / z.norm();
    const double eta = z.norm();
    y.coeffs += z;
    const RecoveryResult res = l1_denoise(sys, y, eta);
    ratios.push_back((res.estimate.coeffs - s.coeffs).norm() / eta);
  }
  const double med = median(ratios);

  const double p = 0.7;
  const double k = 8.0;
  const double scale = std::pow(k, 0.5 - 1.0 / p);
  std::vector<double> comp;
  for (std::uint64_t t = 0; t < 20; ++t) {
    Rng rng = Rng::derive(2015, "compressible", t);
    const DemodulatorSystem sys = draw_system(256, 128, rng);
    const AmplitudeVector s = draw_compressible(256, p, rng);
    const RecoveryResult res = irls_l1(sys, sys.apply(s));
    comp.push_back((res.estimate.coeffs - s.coeffs).norm() / scale);
  }
  const double comp_med = median(comp);
  const double comp_max = *std::max_element(comp.begin(), comp.end());
  return {med <= 10.0 && comp_med <= 10.0,
          "noisy K=5: median ||s_hat - s||/eta " + fmt(med) + " (<= 10, max " +
              fmt(*std::max_element(ratios.begin(), ratios.end())) + "); compressible p=0.7: median error / K^(1/2-1/p) " +
              fmt(comp_med) + " (<= 10, max " + fmt(comp_max) + ")"};
}

// ---- windowing ----

Verdict windowing() {
  WindowConfig cfg;
  cfg.order = 2;
  cfg.k_values.clear();
  for (std::size_t k = 4; k <= 64; ++k) cfg.k_values.push_back(k);
  const WindowResult res = window_demo(cfg);
  const bool pass = std::abs(res.slope_raw + 0.5) <= 0.15 && res.slope_windowed <= -1.2;
  return {pass, "raw slope " + fmt(res.slope_raw) + " (-0.5 +- 0.15); r=2 windowed slope " +
                    fmt(res.slope_windowed) + " (<= -1.2)"};
}

Verdict enob_formula() {
  const double bits = enob(61.96);
  return {bits == 10.0, "ENOB(61.96 dB) = " + io::format_number(bits) + " (== 10.0)"};
}

// ---- determinism ----

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "rdemod");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / ("rdemod-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(root);
  const fs::path sample_dir = root / "sample-0";
  const std::vector<std::vector<std::string>> commands = {
      {"sample", "--w", "256", "--r", "48", "--k", "4", "--seed", "5"},
      {"recover", "--in", sample_dir.string()},
      {"recover", "--in", sample_dir.string(), "--solver", "cosamp"},
      {"sweep", "--w", "128", "--k", "2,4,8", "--r", "16,24,32", "--trials", "10", "--seed", "5"},
      {"sweep", "--mode", "minrate", "--w", "64,128", "--k", "1,2", "--trials", "20", "--seed", "5"},
      {"diagnose", "--w", "128", "--r", "32", "--k", "4", "--draws", "5", "--rip-order", "2", "--seed", "5"},
      {"diagnose", "--w", "4", "--r", "2", "--exhaustive"},
      {"window", "--order", "2"},
      {"am-demo", "--w", "512", "--r", "128", "--k", "4", "--carrier", "100", "--noise", "0.02", "--seed", "5"},
      {"enob", "--snr", "61.96"},
  };
  std::size_t files = 0;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    std::vector<fs::path> dirs;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir =
          c == 0 ? root / ("sample-" + std::to_string(rep)) : root / ("cmd" + std::to_string(c) + "-" + std::to_string(rep));
      auto args = commands[c];
      args.insert(args.end(), {"--out", dir.string()});
      if (run_cli(args) != 0) return {false, "command failed: " + commands[c][0]};
      dirs.push_back(dir);
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      const fs::path other = dirs[1] / entry.path().filename();
      if (!fs::exists(other) || io::read_file(entry.path()) != io::read_file(other))
        return {false, "output differs: " + commands[c][0] + " " + entry.path().filename().string()};
      ++files;
    }
  }
  fs::remove_all(root);
  return {true, std::to_string(commands.size()) + " commands rerun, " + std::to_string(files) +
                    " output files byte-identical"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"rate law vs K at W=512", rate_law},
      {"logarithmic growth in W at K=5", logarithmic_growth},
      {"phase-grid spot checks at W=512", phase_grid_spots},
      {"l1 matches the l0 oracle at W=16, R=8, K=2", oracle_equivalence},
      {"matrix identities", matrix_identities},
      {"continuous-time sampler matches the matrix model", continuous_model},
      {"matrix statistics at W=512 over 500 draws", appendix_statistics},
      {"stability under noise and compressibility", stability},
      {"windowed decay rates", windowing},
      {"ENOB formula", enob_formula},
      {"determinism of CLI artifacts", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failed;
    std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << name << ": " << v.detail << " [" << fmt(secs) << " s]"
              << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " acceptance criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
