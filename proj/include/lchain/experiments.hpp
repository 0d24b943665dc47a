// experiments.hpp — config-driven experiment runners
//
// run_experiment is deterministic: for a fixed config (echo) and seed it
// produces byte-identical artifacts. Anything time-dependent (wall-clock
// stamps, runtimes) belongs to the caller's run_meta sidecar, never here.

#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "lchain/config.hpp"

namespace lchain {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.3.0";

struct RunResult {
    int exit_code = 0;  // 0 ok, 3 convergence/validation gate failure
    nlohmann::ordered_json document;  // what was written to results.json
    std::vector<std::string> artifacts;  // file names created under out_dir
};

RunResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                         int threads = 1);

}  // namespace lchain
