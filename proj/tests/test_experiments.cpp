#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lchain/experiments.hpp"

using namespace lchain;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "lchain_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("dynamics experiment writes gated, reproducible artifacts") {
    const ExperimentConfig config = parse_config(R"({
        "experiment": "dynamics",
        "model": { "gamma": 1.0, "omega_b0": 0.0, "omega_L": 10.0, "coupling_J": 10.0 },
        "pulse": { "shape": "exponential", "linewidth": 0.1 }
    })");
    const fs::path d1 = fresh_dir("dyn1"), d2 = fresh_dir("dyn2");
    const RunResult r1 = run_experiment(config, d1);
    const RunResult r2 = run_experiment(config, d2);
    CHECK(r1.exit_code == 0);
    CHECK(fs::exists(d1 / "results.json"));
    CHECK(fs::exists(d1 / "series.csv"));
    CHECK(slurp(d1 / "results.json") == slurp(d2 / "results.json"));
    CHECK(slurp(d1 / "series.csv") == slurp(d2 / "series.csv"));

    const auto& res = r1.document["results"];
    CHECK(res["p_infinity"].get<double>() == doctest::Approx(0.9523809524).epsilon(1e-6));
    CHECK(res["da_residual"].get<double>() < 1e-3);
    CHECK(r1.document["schema_version"] == kSchemaVersion);
    CHECK(r1.document["config"]["model"]["omega_L"] == 10.0);
    // every run carries a machine-checkable gates block
    for (const auto& [name, gate] : r1.document["gates"].items()) {
        CHECK(gate.contains("value"));
        CHECK(gate.contains("threshold"));
        CHECK(gate.contains("pass"));
    }
}

TEST_CASE("analytic experiment tabulates the closed form") {
    const ExperimentConfig config = parse_config(R"({
        "experiment": "analytic",
        "model": { "gamma": 1.0, "omega_L": 10.0 },
        "analytic": { "delta_pulse": [0.0, 2.0], "detuning": [0.0, 1.0] }
    })");
    const fs::path dir = fresh_dir("an");
    const RunResult r = run_experiment(config, dir);
    CHECK(r.exit_code == 0);
    const std::string csv = slurp(dir / "analytic.csv");
    CHECK(csv.find("# schema_version=1") == 0);
    CHECK(csv.find("delta_pulse,detuning,probability") != std::string::npos);
    // four rows: header+comment plus the cartesian grid
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
    CHECK(r.document["results"]["probability_max"].get<double>() == 1.0);
}

TEST_CASE("chain experiment is seed-deterministic and histogram-complete") {
    const std::string base = R"({
        "experiment": "chain",
        "seed": 2024,
        "model": { "gamma": 1.0, "omega_b0": 0.0, "omega_L": 10.0 },
        "chain": { "gene": "ABBA", "distance": 1.5874010519681994,
                   "coupling": { "j0": 40.0, "r0": 1.0 },
                   "disorder": { "kind": "fixed", "delta": 0.1 },
                   "trials": 4000 },
        "output": { "per_trial_csv": true }
    })";
    const ExperimentConfig config = parse_config(base);
    const fs::path d1 = fresh_dir("chain1"), d2 = fresh_dir("chain2");
    run_experiment(config, d1, 1);
    run_experiment(config, d2, 2);  // different worker count, same bytes
    CHECK(slurp(d1 / "results.json") == slurp(d2 / "results.json"));
    CHECK(slurp(d1 / "trials.csv") == slurp(d2 / "trials.csv"));

    ExperimentConfig reseeded = parse_config(base);
    reseeded.master_seed = 2025;
    const fs::path d3 = fresh_dir("chain3");
    run_experiment(reseeded, d3, 1);
    CHECK(slurp(d1 / "results.json") != slurp(d3 / "results.json"));
}

TEST_CASE("oracle experiment reports the reduced-dynamics comparison") {
    const ExperimentConfig config = parse_config(R"({
        "experiment": "oracle",
        "model": { "gamma": 1.0, "omega_b0": 50.0, "omega_L": 50.0 },
        "pulse": { "shape": "exponential", "linewidth": 2.0 },
        "oracle": { "halfwidth": 10.0, "modes": 601, "dt": 0.002, "t_max": 20.0 }
    })");
    const fs::path dir = fresh_dir("orc");
    const RunResult r = run_experiment(config, dir);
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(dir / "oracle.csv"));
    CHECK(r.document["results"]["norm_drift"].get<double>() < 1e-8);
    CHECK(r.document["results"]["reduced_comparison"]["max_p_dev"].get<double>() < 0.01);
}

TEST_CASE("sweep experiment emits index-ordered rows") {
    const ExperimentConfig config = parse_config(R"({
        "experiment": "sweep",
        "model": { "gamma": 1.0, "omega_b0": 0.0, "omega_L": 10.0, "coupling_J": 10.0 },
        "pulse": { "shape": "exponential", "linewidth": 0.1 },
        "sweep": { "target": "analytic", "axes": [
            { "parameter": "pulse.linewidth", "values": [0.1, 0.5] },
            { "parameter": "detuning", "values": [0.0, 1.0, 5.0] } ] }
    })");
    const fs::path d1 = fresh_dir("sweep1"), d2 = fresh_dir("sweep2");
    const RunResult r = run_experiment(config, d1, 2);
    run_experiment(config, d2, 1);
    CHECK(r.exit_code == 0);
    CHECK(slurp(d1 / "sweep.csv") == slurp(d2 / "sweep.csv"));
    CHECK(r.document["results"]["points"] == 6);

    // axis-0 outermost: first data row is linewidth 0.1, detuning 0
    std::istringstream csv(slurp(d1 / "sweep.csv"));
    std::string line;
    std::getline(csv, line);  // schema comment
    std::getline(csv, line);  // header
    CHECK(line == "pulse.linewidth,detuning,p_rep,p_fail,p_dorm,p_mut");
    std::getline(csv, line);
    CHECK(line.substr(0, 23) == "1.00000000000000006e-01");
}
