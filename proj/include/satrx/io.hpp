// SPDX-License-Identifier: Apache-2.0
//
// Configuration parsing (strict JSON schema), result emission (CSV plus a
// static SVG plot), and the run manifest.

#ifndef SATRX_IO_HPP
#define SATRX_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "satrx/montecarlo.hpp"

namespace satrx {

// Schema violations carry the path to the offending field in the message.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Parses the scenario/sweep JSON schema. Unknown keys are rejected; absent
// keys fall back to the reference-scenario defaults. Enforces the
// overloaded constraint N > M.
SimConfig parse_config_json(const nlohmann::json& j);
SimConfig parse_config_file(const std::string& path);

// Inverse of parsing: emits exactly the schema keys (seed omitted if unset).
nlohmann::json config_to_json(const SimConfig& cfg);

struct RunManifest {
    std::string tool_version;
    std::string config_digest;  // fnv1a64 of the config file bytes, hex
    double wall_seconds = 0.0;
    nlohmann::json resolved_config;
    std::vector<std::string> outputs;
};

std::uint64_t fnv1a64(std::string_view data);

// Header: detector,snr_db,frames,bits,bit_errors,ber. Byte-deterministic.
void write_results_csv(const std::vector<BerPoint>& points, std::ostream& out);

// Log-scaled BER vs SNR, one polyline per detector. Zero-BER points are
// drawn at the 1e-8 axis floor with a distinct marker. Byte-deterministic.
std::string render_ber_svg(const std::vector<BerPoint>& points, const std::string& title);

// Writes results.csv, ber.svg and manifest.json under out_dir, recording
// the file list in the manifest.
void emit_results(const std::vector<BerPoint>& points, RunManifest& manifest,
                  const std::string& out_dir);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace satrx

#endif
