#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polaremit/model.hpp"

namespace polaremit {

enum class RunMode { spectrum, sweep, validate, steady };

std::string to_string(RunMode mode);

struct GridConfig {
    std::optional<double> omega_min;  // default window [0, 2 Omega_R] when unset
    std::optional<double> omega_max;
    int points = 400;
    bool refine = true;
    bool full_window = false;  // window [omega_f - 2 Omega_R, omega_f + 2 Omega_R]
};

struct SweepConfig {
    std::string parameter;  // "r" or "theta"
    std::vector<double> values;
};

struct TruncationConfig {
    bool automatic = true;
    double tol = 1e-10;
    int cap = 32;
    int fixed_l = 0;
};

struct OracleRunConfig {
    double tau_max = 40.0;
    int n_phase = 16;
    int steps_per_period = 32;
};

struct OutputConfig {
    std::string directory = ".";
    std::string stem = "run";
};

struct RunConfig {
    ModelParams model;
    RunMode mode = RunMode::spectrum;
    GridConfig grid;
    SweepConfig sweep;
    TruncationConfig truncation;
    OracleRunConfig oracle;
    double validate_tolerance = 0.02;
    OutputConfig output;
    int threads = 1;
};

/// Parses a configuration document (JSON, // and /* */ comments permitted).
/// Unknown keys are rejected with their dotted path; malformed syntax raises
/// ParseError with the line/column, bad values raise InvalidValue.
RunConfig parse_config(const std::string& text);

/// Serializes a RunConfig back to its canonical JSON document.
std::string config_to_json(const RunConfig& config);

/// Bundled parameter presets (fig1..fig4r10 figure studies, desk_validate).
std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
RunConfig load_preset(const std::string& name);

}  // namespace polaremit
