#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "rdemod/cli.hpp"
#include "rdemod/errors.hpp"
#include "rdemod/io.hpp"

using namespace rdemod;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rdemod-test-" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  return p;
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "rdemod");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("number formatting round trips") {
  for (double v : {0.0, 1.0, -2.5, 0.1, 1e-300, 123456789.125, std::nextafter(1.0, 2.0)}) {
    const std::string s = io::format_number(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(io::format_number(10.0) == "10");
}

TEST_CASE("JSON round trips") {
  Rng rng(1);
  const DemodulatorSystem sys(32, 8, draw_chipping(32, rng));
  const AmplitudeVector s = draw_model_a(32, 3, rng);
  const SampleVector y = sys.apply(s);

  const io::Json js = io::signal_to_json(s);
  CHECK(js["coeffs"].size() == 64);
  CHECK(io::signal_from_json(js).coeffs == s.coeffs);
  CHECK(io::samples_from_json(io::samples_to_json(y)).coeffs == y.coeffs);
  const DemodulatorSystem back = io::system_from_json(io::system_to_json(sys, 5));
  CHECK(back.dense() == sys.dense());

  // Text round trip keeps every bit.
  const io::Json reparsed = io::Json::parse(js.dump());
  CHECK(io::signal_from_json(reparsed).coeffs == s.coeffs);

  CHECK_THROWS_AS(io::complex_from_json(io::Json::array({1.0, 2.0, 3.0})), IoError);
  CHECK_THROWS_AS(io::signal_from_json(io::Json::object()), IoError);
  io::Json bad = io::system_to_json(sys, 5);
  bad["eps"][0] = 2;
  CHECK_THROWS_AS(io::system_from_json(bad), IoError);
}

TEST_CASE("manifest and config hash") {
  const io::Json a = {{"w", 512}, {"k", 5}};
  const io::Json b = {{"w", 512}, {"k", 6}};
  CHECK(io::config_hash(a) == io::config_hash(a));
  CHECK(io::config_hash(a) != io::config_hash(b));
  CHECK(io::config_hash(a).size() == 16);
  const io::Json m = io::manifest("sample", 7, a, {{"fit", nullptr}});
  CHECK(m["schema_version"] == io::kSchemaVersion);
  CHECK(m["seed"] == 7);
  CHECK(m["config_hash"] == io::config_hash(a));
  CHECK(m.contains("fit"));
}

TEST_CASE("CSV writers") {
  TrialGrid grid;
  grid.w = 64;
  grid.trials = 10;
  grid.cells = {{1, 8, 10, false}, {20, 8, 0, true}};
  std::ostringstream g;
  io::write_grid_csv(g, grid);
  CHECK(g.str() == "w,k,r,trials,successes\n64,1,8,10,10\n64,20,8,0,0\n");

  MinRateResult hit{512, 5, 41, {}}, miss{512, 600, std::nullopt, {}};
  std::ostringstream m;
  io::write_minrate_csv(m, {hit, miss});
  CHECK(m.str() == "w,k,r_min\n512,5,41\n512,600,0\n");

  std::ostringstream d;
  io::write_diag_csv(d, {{0, "coherence", 0.25}});
  CHECK(d.str() == "draw,statistic,value\n0,coherence,0.25\n");
}

TEST_CASE("sample and recover") {
  const fs::path a = scratch("sample-a"), b = scratch("sample-b"), r = scratch("recover");
  const auto common = std::vector<std::string>{"--w", "512", "--r", "64", "--k", "5", "--seed", "7"};
  auto args = std::vector<std::string>{"sample"};
  args.insert(args.end(), common.begin(), common.end());
  auto args_a = args, args_b = args;
  args_a.insert(args_a.end(), {"--out", a.string()});
  args_b.insert(args_b.end(), {"--out", b.string()});
  REQUIRE(invoke(args_a).code == cli::kExitOk);
  REQUIRE(invoke(args_b).code == cli::kExitOk);
  for (const char* f : {"signal.json", "samples.json", "system.json", "manifest.json"}) {
    CAPTURE(f);
    CHECK(io::read_file(a / f) == io::read_file(b / f));
  }

  REQUIRE(invoke({"recover", "--in", a.string(), "--out", r.string()}).code == cli::kExitOk);
  const io::Json result = io::read_json(r / "result.json");
  CHECK(result["relative_error"].get<double>() <= 1e-6);
  CHECK(result["recovered"].get<bool>());
  CHECK(fs::exists(r / "manifest.json"));

  for (const char* solver : {"cosamp", "bpdn"}) {
    const fs::path out = scratch(std::string("recover-") + solver);
    REQUIRE(invoke({"recover", "--in", a.string(), "--out", out.string(), "--solver", solver}).code == cli::kExitOk);
    CHECK(io::read_json(out / "result.json")["relative_error"].get<double>() <= 1e-6);
  }
}

TEST_CASE("invalid configurations write nothing") {
  const fs::path out = scratch("invalid");
  CHECK(invoke({"sample", "--w", "512", "--k", "600", "--out", out.string()}).code == cli::kExitConfig);
  CHECK_FALSE(fs::exists(out));
  CHECK(invoke({"sample", "--w", "511", "--out", out.string()}).code == cli::kExitConfig);
  CHECK_FALSE(fs::exists(out));
  CHECK(invoke({"sample", "--w", "64", "--r", "65", "--out", out.string()}).code == cli::kExitConfig);
  CHECK(invoke({"sweep", "--w", "64", "--k", "1", "--r", "8", "--solver", "magic", "--out", out.string()}).code ==
        cli::kExitConfig);
  CHECK(invoke({"sweep", "--mode", "minrate", "--w", "64", "--k", "1", "--trials", "5", "--out", out.string()}).code ==
        cli::kExitConfig);
  CHECK(invoke({"window", "--omega", "12", "--out", out.string()}).code == cli::kExitConfig);
  CHECK(invoke({"bogus"}).code == cli::kExitConfig);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("I/O failures exit with code 3") {
  const fs::path missing = scratch("missing");
  const fs::path out = scratch("io-out");
  CHECK(invoke({"recover", "--in", missing.string(), "--out", out.string()}).code == cli::kExitIo);
  CHECK_FALSE(fs::exists(out));

  const fs::path corrupt = scratch("corrupt");
  REQUIRE(invoke({"sample", "--w", "64", "--r", "16", "--k", "2", "--out", corrupt.string()}).code == cli::kExitOk);
  io::write_file(corrupt / "samples.json", "{ not json");
  CHECK(invoke({"recover", "--in", corrupt.string(), "--out", out.string()}).code == cli::kExitIo);
}

TEST_CASE("sweep writes the documented CSV shapes") {
  const fs::path grid = scratch("grid");
  REQUIRE(invoke({"sweep", "--w", "64", "--k", "1,2,4", "--r", "8,16,32", "--trials", "10", "--seed", "3", "--out",
               grid.string()})
              .code == cli::kExitOk);
  const auto rows = lines(io::read_file(grid / "grid.csv"));
  REQUIRE(rows.size() == 10);
  CHECK(rows[0] == "w,k,r,trials,successes");

  const fs::path minrate = scratch("minrate");
  REQUIRE(invoke({"sweep", "--mode", "minrate", "--w", "64", "--k", "1,2,3", "--trials", "20", "--seed", "3", "--out",
               minrate.string()})
              .code == cli::kExitOk);
  const auto mrows = lines(io::read_file(minrate / "minrate.csv"));
  REQUIRE(mrows.size() == 4);
  CHECK(mrows[0] == "w,k,r_min");
  const io::Json manifest = io::read_json(minrate / "manifest.json");
  CHECK(manifest["fit"].is_object());
}

TEST_CASE("diagnose, window, am-demo and enob") {
  const fs::path diag = scratch("diag");
  REQUIRE(invoke({"diagnose", "--w", "4", "--r", "2", "--exhaustive", "--out", diag.string()}).code == cli::kExitOk);
  const auto rows = lines(io::read_file(diag / "diag.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[1] == "0,gram_mean_max_dev,0");

  const fs::path stats = scratch("stats");
  REQUIRE(invoke({"diagnose", "--w", "64", "--r", "16", "--k", "4", "--draws", "3", "--rip-order", "2", "--out",
               stats.string()})
              .code == cli::kExitOk);
  CHECK(lines(io::read_file(stats / "diag.csv")).size() == 1 + 3 * 7);

  const fs::path win = scratch("window");
  REQUIRE(invoke({"window", "--k", "4,8,16", "--out", win.string()}).code == cli::kExitOk);
  CHECK(lines(io::read_file(win / "window.csv")).size() == 4);
  CHECK(io::read_json(win / "manifest.json").contains("slope_windowed"));

  const fs::path am = scratch("am");
  REQUIRE(invoke({"am-demo", "--w", "256", "--r", "256", "--k", "2", "--carrier", "60", "--bandwidth", "8", "--out",
               am.string()})
              .code == cli::kExitOk);
  CHECK(io::read_json(am / "am.json")["snr_db"].get<double>() >= 60.0);

  const Run e = invoke({"enob", "--snr", "61.96"});
  CHECK(e.code == cli::kExitOk);
  CHECK(e.out == "enob 10\n");
}
