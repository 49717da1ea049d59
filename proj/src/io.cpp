#include "rdemod/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "rdemod/errors.hpp"

namespace rdemod::io {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

Json complex_to_json(const Eigen::VectorXcd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    arr.push_back(v[i].real());
    arr.push_back(v[i].imag());
  }
  return arr;
}

Eigen::VectorXcd complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() % 2 != 0) throw IoError("complex vector must be an even-length array");
  Eigen::VectorXcd v(static_cast<Eigen::Index>(j.size() / 2));
  for (std::size_t i = 0; i < j.size() / 2; ++i) {
    const Json& re = j[2 * i];
    const Json& im = j[2 * i + 1];
    if (!re.is_number() || !im.is_number()) throw IoError("complex vector entries must be numbers");
    v[static_cast<Eigen::Index>(i)] = {re.get<double>(), im.get<double>()};
  }
  return v;
}

namespace {

const Json& member(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw IoError(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::size_t size_member(const Json& j, const char* key) {
  const Json& v = member(j, key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw IoError(std::string("field '") + key + "' must be a nonnegative integer");
  return v.get<std::size_t>();
}

}  // namespace

Json signal_to_json(const AmplitudeVector& s) {
  return {{"w", s.w()}, {"coeffs", complex_to_json(s.coeffs)}};
}

AmplitudeVector signal_from_json(const Json& j) {
  AmplitudeVector s{complex_from_json(member(j, "coeffs"))};
  if (s.w() != size_member(j, "w")) throw IoError("signal length does not match w");
  return s;
}

Json samples_to_json(const SampleVector& y, double noise_l2) {
  return {{"r", static_cast<std::size_t>(y.coeffs.size())}, {"noise_l2", noise_l2}, {"coeffs", complex_to_json(y.coeffs)}};
}

SampleVector samples_from_json(const Json& j) {
  SampleVector y{complex_from_json(member(j, "coeffs"))};
  if (static_cast<std::size_t>(y.coeffs.size()) != size_member(j, "r"))
    throw IoError("sample count does not match r");
  return y;
}

Json system_to_json(const DemodulatorSystem& system, std::uint64_t seed) {
  Json eps = Json::array();
  for (std::int8_t e : system.chipping().values()) eps.push_back(static_cast<int>(e));
  return {{"w", system.w()}, {"r", system.r()}, {"seed", seed}, {"eps", eps}};
}

DemodulatorSystem system_from_json(const Json& j) {
  const std::size_t w = size_member(j, "w");
  const std::size_t r = size_member(j, "r");
  const Json& eps = member(j, "eps");
  if (!eps.is_array()) throw IoError("eps must be an array");
  std::vector<std::int8_t> signs;
  for (const Json& e : eps) {
    if (!e.is_number_integer()) throw IoError("eps entries must be integers");
    signs.push_back(static_cast<std::int8_t>(e.get<int>()));
  }
  try {
    return build_system(w, r, ChippingSequence(std::move(signs)));
  } catch (const std::domain_error& e) {
    throw IoError(std::string("invalid system: ") + e.what());
  }
}

Json result_to_json(const RecoveryResult& result) {
  return {{"converged", result.converged},
          {"iterations", result.iterations},
          {"residual_l2", result.residual_l2},
          {"estimate", signal_to_json(result.estimate)}};
}

std::string config_hash(const Json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  auto res = std::to_chars(buf, buf + 16, h, 16);
  std::string hex(buf, res.ptr);
  return std::string(16 - hex.size(), '0') + hex;
}

Json manifest(std::string_view command, std::uint64_t seed, const Json& config, const Json& extra) {
  Json m = {{"schema_version", kSchemaVersion},
            {"code_version", std::string(kCodeVersion)},
            {"command", std::string(command)},
            {"seed", seed},
            {"config", config},
            {"config_hash", config_hash(config)}};
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  return m;
}

void write_grid_csv(std::ostream& out, const TrialGrid& grid) {
  out << "w,k,r,trials,successes\n";
  for (const auto& c : grid.cells)
    out << grid.w << ',' << c.k << ',' << c.r << ',' << (c.skipped ? 0 : grid.trials) << ','
        << c.successes << '\n';
}

void write_minrate_csv(std::ostream& out, const std::vector<MinRateResult>& results) {
  out << "w,k,r_min\n";
  for (const auto& m : results) out << m.w << ',' << m.k << ',' << m.r_min.value_or(0) << '\n';
}

void write_window_csv(std::ostream& out, const WindowResult& result) {
  out << "k,err_raw,err_windowed\n";
  for (const auto& row : result.rows)
    out << row.k << ',' << format_number(row.err_raw) << ',' << format_number(row.err_windowed) << '\n';
}

void write_diag_csv(std::ostream& out, const std::vector<DiagRecord>& records) {
  out << "draw,statistic,value\n";
  for (const auto& d : records) out << d.draw << ',' << d.statistic << ',' << format_number(d.value) << '\n';
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

Json read_json(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw IoError("malformed JSON in " + path.string());
  return j;
}

void write_json(const std::filesystem::path& path, const Json& j) { write_file(path, j.dump(2) + "\n"); }

}  // namespace rdemod::io
