#pragma once

// Artifact formats. JSON goes through nlohmann::json (keys sorted, shortest
// round-trip doubles); complex vectors are flat [re0, im0, re1, im1, ...]
// arrays. CSV numbers use std::to_chars, so output never depends on locale.

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "rdemod/demodulator.hpp"
#include "rdemod/experiments.hpp"
#include "rdemod/recover.hpp"
#include "rdemod/window.hpp"

namespace rdemod::io {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kCodeVersion = "0.1.0";

/// Shortest decimal string that round-trips (std::to_chars).
std::string format_number(double value);

Json complex_to_json(const Eigen::VectorXcd& v);
/// Throws IoError on an odd-length or non-numeric array.
Eigen::VectorXcd complex_from_json(const Json& j);

Json signal_to_json(const AmplitudeVector& s);
AmplitudeVector signal_from_json(const Json& j);

/// {"r", "noise_l2", "coeffs"}.
Json samples_to_json(const SampleVector& y, double noise_l2 = 0.0);
SampleVector samples_from_json(const Json& j);

/// {"w", "r", "seed", "eps"}. `seed` is informational; the eps array rebuilds
/// the system.
Json system_to_json(const DemodulatorSystem& system, std::uint64_t seed);
DemodulatorSystem system_from_json(const Json& j);

Json result_to_json(const RecoveryResult& result);

/// FNV-1a over the compact dump of `config`, as 16 hex digits.
std::string config_hash(const Json& config);

/// {"schema_version", "code_version", "command", "seed", "config",
/// "config_hash"} plus any `extra` members.
Json manifest(std::string_view command, std::uint64_t seed, const Json& config,
              const Json& extra = Json::object());

void write_grid_csv(std::ostream& out, const TrialGrid& grid);
/// A search that never reached the target is written with r_min = 0.
void write_minrate_csv(std::ostream& out, const std::vector<MinRateResult>& results);
void write_window_csv(std::ostream& out, const WindowResult& result);

struct DiagRecord {
  std::size_t draw = 0;
  std::string statistic;
  double value = 0.0;
};
void write_diag_csv(std::ostream& out, const std::vector<DiagRecord>& records);

/// Whole-file helpers; both throw IoError.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);
Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace rdemod::io
