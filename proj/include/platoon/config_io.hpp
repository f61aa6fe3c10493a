#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "platoon/simulation.hpp"

namespace platoon {

/// Parses a scenario from JSON text. Field names carry units (tau_s,
/// delay_s, headway_s, ...). Unknown keys are rejected with a message
/// listing them; delays off the ts grid are rejected naming the vehicle
/// unless the config sets "allow_delay_rounding": true, in which case they
/// are rounded to the nearest sample and the rounded values appear in the
/// resolved config.
ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig parse_scenario_file(const std::filesystem::path& path);

/// Serializes the fully resolved configuration (all defaults applied).
/// parse_scenario(scenario_to_json(cfg)) reproduces cfg exactly.
std::string scenario_to_json(const ScenarioConfig& cfg);

/// Writes one CSV file: header row, comma delimiter, newline-terminated
/// rows, values printed with 17 significant digits so a re-read is lossless.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

/// Reads a CSV produced by write_csv; returns columns in header order.
std::vector<std::vector<double>> read_csv(const std::filesystem::path& path,
                                          std::vector<std::string>* header = nullptr);

/// Writes the per-signal-family time-series files (speeds.csv, gaps.csv,
/// accels.csv, inputs_commanded.csv, inputs_applied.csv, metrics.csv) into
/// `dir` and returns the file names written.
std::vector<std::string> write_sim_output(const std::filesystem::path& dir,
                                          const SimOutput& out);

/// FNV-1a 64-bit hash, hex-encoded; used to fingerprint config inputs.
std::string fnv1a_hex(const std::string& bytes);

inline constexpr const char* kToolVersion = "0.1.0";

/// Provenance record written next to every output set.
struct RunManifest {
    std::string tool_version = kToolVersion;
    std::string command;
    std::uint64_t seed = 0;
    std::string input_hash;           ///< hash of the config text or preset name
    std::string resolved_config_json; ///< echo of the configuration actually run
    std::vector<std::string> outputs;
};

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);

}  // namespace platoon
