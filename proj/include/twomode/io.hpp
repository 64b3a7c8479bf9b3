#ifndef TWOMODE_IO_HPP
#define TWOMODE_IO_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "twomode/circuit.hpp"
#include "twomode/locator.hpp"
#include "twomode/noise.hpp"
#include "twomode/ramsey.hpp"

namespace twomode {

inline constexpr const char* kVersion = "0.1.0";

struct SweepConfig {
    double ratio_min = 15.0;
    double ratio_max = 80.0;
    int n_points = 14;
    double ep_over_ec = 0.4;
};

struct LocalizeConfig {
    double ng_sigma = 0.0;
    double ng_delta = 0.0;
    double sigma = 2e-3;   // 1-sigma uncertainty on both offsets
    double q_assumed = 1.0;
};

// Parsed, validated run configuration. Physical quantities carry their unit
// in the JSON key (e.g. "ej1_GHz"); unknown or unitless keys are rejected.
struct RunConfig {
    CircuitParams device{11.0, 11.0, 0.5, 0.2};
    ChargeConfig charge{0.0, 0.0};
    ExperimentConfig experiment{.delays_us = uniform_delays(400, 20.0)};
    NoiseModel noise;
    ScenarioScript scenario;
    DeviceGeometry geometry;
    SweepConfig sweep;
    LocalizeConfig localize;
    RamseyMode mode = RamseyMode::Delta;

    std::string map_source = "surrogate";  // or "file"
    std::string map_path;
    double map_half_um = 600.0;
    int map_n = 121;

    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int cutoff = 10;

    std::string config_hash;  // FNV-1a of the canonical config text
};

RunConfig parse_config_text(const std::string& json_text);
RunConfig load_config(const std::string& path);

// Builds the sensitivity map the config names (surrogate or file).
SensitivityMap config_map(const RunConfig& cfg);

std::uint64_t fnv1a(const std::string& data);
std::string fnv1a_hex(const std::string& data);

// A named table of mixed text/numeric cells with unit-annotated headers.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
    static std::string num(double v);
};

struct ResultBundle {
    std::string command;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::vector<Table> tables;
    std::map<std::string, double> metrics;
    std::map<std::string, std::string> info;

    const Table* table(const std::string& name) const;
    // Writes <name>.tsv per table plus metrics.json into the directory
    // (created if missing).
    void write(const std::string& dir) const;
};

}  // namespace twomode

#endif
