// config.hpp — experiment configuration: parsing, validation, defaults, echo

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lchain/chain.hpp"
#include "lchain/dynamics.hpp"
#include "lchain/model.hpp"
#include "lchain/pulse.hpp"

namespace lchain {

// Malformed document, unknown key, or violated physical invariant. The
// message carries the key path.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { Analytic, Dynamics, Oracle, Chain, Sweep };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct SweepAxis {
    std::string parameter;
    std::vector<double> values;
};

struct AnalyticConfig {
    std::vector<double> delta_pulse{0.1};
    std::vector<double> detuning{0.0};
};

struct OracleConfig {
    double halfwidth = 20.0;
    int modes = 4001;
    double dt = 0.0;     // 0: choose from the comb rate
    double t_max = 0.0;  // 0: pulse support plus ring-down
    bool compare_dynamics = true;
    std::vector<std::pair<int, double>> resolutions;  // optional discrepancy sweep
};

struct ChainConfig {
    std::string gene;
    std::vector<double> distances;  // either explicit per base or filled from `distance`
    CouplingLaw law;
    DisorderSpec disorder;
    std::uint64_t trials = 10000;
};

struct OutputConfig {
    bool series_csv = true;
    bool per_trial_csv = false;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Analytic;
    ModelParams model;
    PulseSpec pulse = PulseSpec::vacuum();
    bool has_pulse = false;
    Branch branch = Branch::A;
    std::optional<TimeGrid> grid;
    AnalyticConfig analytic;
    OracleConfig oracle;
    std::optional<ChainConfig> chain;
    std::string sweep_target = "analytic";
    std::vector<SweepAxis> sweep_axes;
    OutputConfig output;
    std::uint64_t master_seed = 0;

    // canonical resolved form: every default filled in, echoed into results
    nlohmann::ordered_json echo() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Sweep support: the admissible parameter names, and in-place application of
// one override to a config copy.
const std::vector<std::string>& sweep_parameter_names();
void apply_sweep_override(ExperimentConfig& config, const std::string& parameter, double value);

}  // namespace lchain
