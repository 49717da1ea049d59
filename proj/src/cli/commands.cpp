#include "rdemod/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdemod/analyze.hpp"
#include "rdemod/errors.hpp"
#include "rdemod/experiments.hpp"
#include "rdemod/io.hpp"
#include "rdemod/window.hpp"

namespace rdemod::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

struct Options {
  std::size_t w = 512;
  std::size_t r = 64;
  std::size_t k = 5;
  std::vector<std::size_t> w_list;
  std::vector<std::size_t> k_list;
  std::vector<std::size_t> r_list;
  std::size_t trials = 100;
  std::size_t draws = 100;
  std::size_t threads = 1;
  std::uint64_t seed = 0;
  std::string solver = "irls";
  std::string mode = "grid";
  std::string out;
  std::string in;
  double eta = 0.0;
  double noise = 0.0;
  double target = 0.99;
  double omega = 100.37;
  std::size_t order = 2;
  std::size_t samples = 16384;
  long carrier = 200;
  long bandwidth = 32;
  double snr = 0.0;
  bool exhaustive = false;
  std::size_t rip_order = 0;
  std::size_t rip_budget = 2000;
};

void validate_dims(std::size_t w, std::size_t r) {
  require(w >= 2 && w % 2 == 0, "--w must be even and >= 2 (got " + std::to_string(w) + ")");
  require(r >= 1 && r <= w, "--r must lie in [1, W] (got " + std::to_string(r) + ")");
}

fs::path prepare_out(const std::string& dir) {
  const fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
  return p;
}

SolverConfig solver_config(const Options& o) {
  SolverConfig cfg;
  cfg.eta = o.eta;
  return cfg;
}

void write_manifest(const fs::path& dir, std::string_view command, const Options& o, const Json& config,
                    const Json& extra = Json::object()) {
  io::write_json(dir / "manifest.json", io::manifest(command, o.seed, config, extra));
}

// ---- sample ----

void validate_sample(const Options& o) {
  validate_dims(o.w, o.r);
  require(o.k <= o.w, "--k must not exceed --w");
  require(o.noise >= 0.0 && std::isfinite(o.noise), "--noise must be a nonnegative number");
}

void cmd_sample(const Options& o, std::ostream& out) {
  Rng chip_rng = Rng::derive(o.seed, "sample", "chipping");
  Rng sig_rng = Rng::derive(o.seed, "sample", "signal");
  Rng noise_rng = Rng::derive(o.seed, "sample", "noise");
  const DemodulatorSystem system(o.w, o.r, draw_chipping(o.w, chip_rng));
  const AmplitudeVector s = draw_model_a(o.w, o.k, sig_rng);
  SampleVector y = system.apply(s);
  double noise_l2 = 0.0;
  if (o.noise > 0.0) {
    Eigen::VectorXcd z(y.coeffs.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = noise_rng.complex_normal();
    z *= o.noise * y.coeffs.norm() / z.norm();
    noise_l2 = z.norm();
    y.coeffs += z;
  }
  const fs::path dir = prepare_out(o.out);
  io::write_json(dir / "signal.json", io::signal_to_json(s));
  io::write_json(dir / "samples.json", io::samples_to_json(y, noise_l2));
  io::write_json(dir / "system.json", io::system_to_json(system, o.seed));
  const Json config = {{"w", o.w}, {"r", o.r}, {"k", o.k}, {"noise", o.noise}};
  write_manifest(dir, "sample", o, config);
  out << "wrote signal.json, samples.json, system.json to " << o.out << "\n";
}

// ---- recover ----

void cmd_recover(const Options& o, bool k_given, std::ostream& out) {
  const Solver solver = parse_solver(o.solver);
  require(o.eta >= 0.0 && std::isfinite(o.eta), "--eta must be a nonnegative number");
  const fs::path in(o.in);
  const DemodulatorSystem system = io::system_from_json(io::read_json(in / "system.json"));
  const SampleVector y = io::samples_from_json(io::read_json(in / "samples.json"));
  if (static_cast<std::size_t>(y.coeffs.size()) != system.r())
    throw IoError("samples.json length does not match system.json");
  std::optional<AmplitudeVector> truth;
  if (fs::exists(in / "signal.json")) {
    truth = io::signal_from_json(io::read_json(in / "signal.json"));
    if (truth->w() != system.w()) throw IoError("signal.json length does not match system.json");
  }
  std::size_t k = o.k;
  if (!k_given) {
    require(truth.has_value() || solver == Solver::irls || solver == Solver::bpdn,
            "--k is required for this solver when signal.json is absent");
    if (truth) k = truth->sparsity();
  }
  if (solver == Solver::cosamp)
    require(k >= 1 && 2 * k <= system.r(), "cosamp needs 1 <= K <= R/2");

  const RecoveryResult result = solve(solver, system, y, k, solver_config(o));
  Json doc = io::result_to_json(result);
  doc["solver"] = std::string(to_string(solver));
  if (truth) {
    const double rel = relative_error(result.estimate, *truth);
    doc["relative_error"] = rel;
    doc["recovered"] = rel <= 1e-6;
  }
  const fs::path dir = prepare_out(o.out);
  io::write_json(dir / "result.json", doc);
  const Json config = {{"in", o.in}, {"solver", o.solver}, {"k", k}, {"eta", o.eta}};
  write_manifest(dir, "recover", o, config);
  out << "solver " << to_string(solver) << ": converged=" << (result.converged ? "true" : "false")
      << " iterations=" << result.iterations << " residual=" << io::format_number(result.residual_l2);
  if (truth) out << " relative_error=" << io::format_number(doc["relative_error"].get<double>());
  out << "\n";
}

// ---- sweep ----

void cmd_sweep(const Options& o, std::ostream& out) {
  const Solver solver = parse_solver(o.solver);
  require(o.mode == "grid" || o.mode == "minrate", "--mode must be grid or minrate");
  require(!o.w_list.empty() && !o.k_list.empty(), "sweep needs --w and --k");
  for (std::size_t w : o.w_list) validate_dims(w, 1);
  require(o.trials >= 1, "--trials must be positive");
  require(o.eta >= 0.0, "--eta must be nonnegative");
  SolverConfig cfg = solver_config(o);

  Json config = {{"mode", o.mode},  {"w", o.w_list},   {"k", o.k_list},
                 {"trials", o.trials}, {"solver", o.solver}, {"eta", o.eta}};
  if (o.mode == "grid") {
    require(o.w_list.size() == 1, "grid mode takes a single --w");
    require(!o.r_list.empty(), "grid mode needs --r");
    for (std::size_t r : o.r_list) validate_dims(o.w_list[0], r);
    config["r"] = o.r_list;
    GridConfig gc;
    gc.w = o.w_list[0];
    gc.k_values = o.k_list;
    gc.r_values = o.r_list;
    gc.trials = o.trials;
    gc.seed = o.seed;
    gc.solver = solver;
    gc.solver_config = cfg;
    gc.threads = o.threads;
    const fs::path dir = prepare_out(o.out);
    const TrialGrid grid = success_grid(gc);
    std::ostringstream csv;
    io::write_grid_csv(csv, grid);
    io::write_file(dir / "grid.csv", csv.str());
    write_manifest(dir, "sweep", o, config);
    out << "wrote " << grid.cells.size() << " cells to grid.csv\n";
    return;
  }

  require(o.trials >= 20, "minrate mode needs --trials >= 20");
  require(o.target > 0.0 && o.target < 1.0, "--target must lie in (0, 1)");
  for (std::size_t w : o.w_list)
    for (std::size_t k : o.k_list) require(k <= w, "--k must not exceed --w");
  config["target"] = o.target;
  const fs::path dir = prepare_out(o.out);
  MinRateConfig mc;
  mc.trials = o.trials;
  mc.target_success = o.target;
  mc.seed = o.seed;
  mc.solver = solver;
  mc.solver_config = cfg;
  std::vector<MinRateResult> results;
  std::vector<RatePoint> points;
  for (std::size_t w : o.w_list) {
    for (std::size_t k : o.k_list) {
      results.push_back(min_rate_search(w, k, mc));
      if (results.back().r_min)
        points.push_back({static_cast<double>(k), static_cast<double>(w),
                          static_cast<double>(*results.back().r_min)});
    }
  }
  std::ostringstream csv;
  io::write_minrate_csv(csv, results);
  io::write_file(dir / "minrate.csv", csv.str());
  Json extra = Json::object();
  try {
    const RegressionFit fit = fit_rate_law(points);
    extra["fit"] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"log", "natural"}};
  } catch (const std::domain_error&) {
    extra["fit"] = nullptr;
  }
  write_manifest(dir, "sweep", o, config, extra);
  out << "wrote " << results.size() << " rows to minrate.csv\n";
}

// ---- diagnose ----

void cmd_diagnose(const Options& o, std::ostream& out) {
  validate_dims(o.w, o.r);
  std::vector<io::DiagRecord> records;
  Json config = {{"w", o.w}, {"r", o.r}, {"exhaustive", o.exhaustive}};
  if (o.exhaustive) {
    require(o.w <= 20, "--exhaustive enumerates 2^W sequences; needs W <= 20");
    const fs::path dir = prepare_out(o.out);
    const Eigen::MatrixXcd mean = mean_gram_exhaustive(o.w, o.r);
    const Eigen::MatrixXcd dev = mean - Eigen::MatrixXcd::Identity(mean.rows(), mean.cols());
    records.push_back({0, "gram_mean_max_dev", dev.cwiseAbs().maxCoeff()});
    std::ostringstream csv;
    io::write_diag_csv(csv, records);
    io::write_file(dir / "diag.csv", csv.str());
    write_manifest(dir, "diagnose", o, config);
    out << "gram_mean_max_dev " << io::format_number(records[0].value) << "\n";
    return;
  }
  require(o.w <= kDenseLimit, "diagnose needs W <= " + std::to_string(kDenseLimit));
  require(o.draws >= 1, "--draws must be positive");
  require(o.k >= 1 && o.k <= o.r && o.k < o.w, "--k must lie in [1, R] and below W");
  require(o.rip_order <= o.r, "--rip-order must not exceed R");
  config["draws"] = o.draws;
  config["k"] = o.k;
  config["rip_order"] = o.rip_order;
  config["rip_budget"] = o.rip_budget;
  const fs::path dir = prepare_out(o.out);
  const double entry_bound = std::sqrt(10.0 * std::log(static_cast<double>(o.w)) / static_cast<double>(o.r));
  for (std::size_t d = 0; d < o.draws; ++d) {
    Rng rng = Rng::derive(o.seed, "diagnose", d);
    const DemodulatorSystem system(o.w, o.r, draw_chipping(o.w, rng));
    const Eigen::MatrixXcd phi = system.dense();
    const GramDeviation g = gram_deviation(phi);
    const double entry = phi.cwiseAbs().maxCoeff();
    const auto support = random_support(o.w, o.k, rng);
    records.push_back({d, "max_entry", entry});
    records.push_back({d, "entry_bound_exceeded", entry > entry_bound ? 1.0 : 0.0});
    records.push_back({d, "column_norm_dev", g.max_diagonal});
    records.push_back({d, "coherence", coherence(g)});
    records.push_back({d, "cumulative_coherence", cumulative_coherence(g, support)});
    records.push_back({d, "submatrix_condition", submatrix_condition(g, support)});
    if (o.rip_order > 0)
      records.push_back({d, "rip_delta", rip_estimate(g, o.rip_order, o.rip_budget, Rng::derive_seed(o.seed, "rip", d)).delta_hat});
  }
  std::ostringstream csv;
  io::write_diag_csv(csv, records);
  io::write_file(dir / "diag.csv", csv.str());
  write_manifest(dir, "diagnose", o, config);
  out << "wrote " << records.size() << " records to diag.csv\n";
}

// ---- window ----

void cmd_window(const Options& o, std::ostream& out) {
  WindowConfig wc;
  wc.omega_prime = o.omega;
  wc.order = o.order;
  if (!o.k_list.empty()) wc.k_values = o.k_list;
  wc.samples = o.samples;
  require(std::isfinite(o.omega) && o.omega != std::round(o.omega), "--omega must be non-integral");
  require(o.order >= 1, "--order must be >= 1");
  require(wc.k_values.size() >= 2, "--k needs at least two values");
  for (std::size_t k : wc.k_values) require(k >= 1 && 4 * k <= wc.samples, "--k values must lie in [1, samples/4]");
  const fs::path dir = prepare_out(o.out);
  const WindowResult res = window_demo(wc);
  std::ostringstream csv;
  io::write_window_csv(csv, res);
  io::write_file(dir / "window.csv", csv.str());
  const Json config = {{"omega", o.omega}, {"order", o.order}, {"k", wc.k_values}, {"samples", o.samples}};
  write_manifest(dir, "window", o, config,
                 {{"slope_raw", res.slope_raw}, {"slope_windowed", res.slope_windowed}, {"degree", res.degree}});
  out << "slope_raw " << io::format_number(res.slope_raw) << " slope_windowed "
      << io::format_number(res.slope_windowed) << "\n";
}

// ---- am-demo ----

void cmd_am(const Options& o, std::ostream& out) {
  validate_dims(o.w, o.r);
  require(o.k >= 2 && o.k % 2 == 0, "--k (message tones) must be even and >= 2");
  require(o.bandwidth >= 1 && o.k / 2 <= static_cast<std::size_t>(o.bandwidth), "--bandwidth too small for --k");
  require(o.carrier > o.bandwidth && o.carrier + o.bandwidth <= static_cast<long>(o.w / 2) - 1,
          "--carrier band must fit inside (0, W/2 - 1]");
  require(o.noise >= 0.0 && std::isfinite(o.noise), "--noise must be a nonnegative number");
  AmConfig ac;
  ac.w = o.w;
  ac.r = o.r;
  ac.message_k = o.k;
  ac.carrier = o.carrier;
  ac.bandwidth = o.bandwidth;
  ac.noise_level = o.noise;
  ac.seed = o.seed;
  const fs::path dir = prepare_out(o.out);
  const AmResult res = am_demo(ac);
  Json doc = {{"snr_db", res.snr_db},
              {"converged", res.converged},
              {"message_freqs", res.message_freqs},
              {"message", io::complex_to_json(res.message)},
              {"reconstructed", io::complex_to_json(res.reconstructed)},
              {"residual_error", res.residual_error}};
  io::write_json(dir / "am.json", doc);
  const Json config = {{"w", o.w},           {"r", o.r},         {"k", o.k},
                       {"carrier", o.carrier}, {"bandwidth", o.bandwidth}, {"noise", o.noise}};
  write_manifest(dir, "am-demo", o, config);
  out << "snr_db " << io::format_number(res.snr_db) << "\n";
}

// ---- enob ----

void cmd_enob(const Options& o, std::ostream& out) {
  require(std::isfinite(o.snr), "--snr must be finite");
  const double bits = enob(o.snr);
  if (!o.out.empty()) {
    const fs::path dir = prepare_out(o.out);
    io::write_json(dir / "enob.json", {{"snr_db", o.snr}, {"enob", bits}});
    write_manifest(dir, "enob", o, {{"snr", o.snr}});
  }
  out << "enob " << io::format_number(bits) << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Random demodulator simulation lab", "rdemod"};
  app.require_subcommand(1);

  auto* sample = app.add_subcommand("sample", "Draw a signal and a system, write y, s and the system");
  sample->add_option("--w", o.w, "Bandlimit W (even)");
  sample->add_option("--r", o.r, "Sampling rate R");
  sample->add_option("--k", o.k, "Number of tones");
  sample->add_option("--seed", o.seed, "Master seed");
  sample->add_option("--noise", o.noise, "Noise norm as a fraction of ||y||");
  sample->add_option("--out", o.out, "Output directory")->required();

  auto* recover = app.add_subcommand("recover", "Recover a signal from a sample directory");
  recover->add_option("--in", o.in, "Directory written by `sample`")->required();
  recover->add_option("--out", o.out, "Output directory")->required();
  recover->add_option("--solver", o.solver, "irls | bpdn | cosamp | l0");
  auto* recover_k = recover->add_option("--k", o.k, "Sparsity for cosamp and l0");
  recover->add_option("--eta", o.eta, "Noise radius for bpdn");
  recover->add_option("--seed", o.seed, "Recorded in the manifest");

  auto* sweep = app.add_subcommand("sweep", "Phase-transition grid or minimum-rate search");
  sweep->add_option("--mode", o.mode, "grid | minrate");
  sweep->add_option("--w", o.w_list, "Bandlimit(s)")->delimiter(',')->required();
  sweep->add_option("--k", o.k_list, "Sparsity values")->delimiter(',')->required();
  sweep->add_option("--r", o.r_list, "Sampling rates (grid mode)")->delimiter(',');
  sweep->add_option("--trials", o.trials, "Trials per cell or rate");
  sweep->add_option("--target", o.target, "Success target (minrate mode)");
  sweep->add_option("--seed", o.seed, "Master seed");
  sweep->add_option("--solver", o.solver, "irls | bpdn | cosamp | l0");
  sweep->add_option("--eta", o.eta, "Noise radius for bpdn");
  sweep->add_option("--threads", o.threads, "Worker threads (grid mode)");
  sweep->add_option("--out", o.out, "Output directory")->required();

  auto* diagnose = app.add_subcommand("diagnose", "Matrix statistics over random draws");
  diagnose->add_option("--w", o.w, "Bandlimit W");
  diagnose->add_option("--r", o.r, "Sampling rate R");
  diagnose->add_option("--k", o.k, "Support size for local statistics");
  diagnose->add_option("--draws", o.draws, "Number of systems");
  diagnose->add_option("--seed", o.seed, "Master seed");
  diagnose->add_option("--rip-order", o.rip_order, "RIP order (0 skips)");
  diagnose->add_option("--rip-budget", o.rip_budget, "Supports per RIP estimate");
  diagnose->add_flag("--exhaustive", o.exhaustive, "Average the Gram matrix over every chipping sequence");
  diagnose->add_option("--out", o.out, "Output directory")->required();

  auto* window = app.add_subcommand("window", "Best-K error decay of a nonharmonic tone");
  window->add_option("--omega", o.omega, "Tone frequency (non-integral)");
  window->add_option("--order", o.order, "Window decay order r");
  window->add_option("--k", o.k_list, "K values")->delimiter(',');
  window->add_option("--samples", o.samples, "FFT length");
  window->add_option("--seed", o.seed, "Recorded in the manifest");
  window->add_option("--out", o.out, "Output directory")->required();

  auto* am = app.add_subcommand("am-demo", "Synthetic AM acquisition and demodulation");
  am->add_option("--w", o.w, "Bandlimit W");
  am->add_option("--r", o.r, "Sampling rate R");
  am->add_option("--k", o.k, "Message tones (even)");
  am->add_option("--carrier", o.carrier, "Carrier frequency");
  am->add_option("--bandwidth", o.bandwidth, "Message bandwidth");
  am->add_option("--noise", o.noise, "Noise norm as a fraction of ||y||");
  am->add_option("--seed", o.seed, "Master seed");
  am->add_option("--out", o.out, "Output directory")->required();

  auto* enob_cmd = app.add_subcommand("enob", "Effective number of bits for an SNR");
  enob_cmd->add_option("--snr", o.snr, "SNR in dB")->required();
  enob_cmd->add_option("--out", o.out, "Optional output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sample->parsed()) {
      validate_sample(o);
      cmd_sample(o, out);
    } else if (recover->parsed()) {
      cmd_recover(o, recover_k->count() > 0, out);
    } else if (sweep->parsed()) {
      cmd_sweep(o, out);
    } else if (diagnose->parsed()) {
      cmd_diagnose(o, out);
    } else if (window->parsed()) {
      cmd_window(o, out);
    } else if (am->parsed()) {
      cmd_am(o, out);
    } else if (enob_cmd->parsed()) {
      cmd_enob(o, out);
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace rdemod::cli
