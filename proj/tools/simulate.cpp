// simulate — run closed-form, time-domain, full-mode, Monte Carlo and sweep
// experiments from a JSON config.
//
// Exit codes: 0 success, 2 config error, 3 convergence/validation gate failure.

#include <chrono>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lchain/experiments.hpp"

namespace {

struct Options {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
};

void write_run_meta(const std::filesystem::path& out_dir, double elapsed_seconds, int threads) {
    // Wall-clock metadata lives here, outside the deterministic result documents.
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    nlohmann::ordered_json meta = {{"timestamp_utc", stamp},
                                   {"elapsed_seconds", elapsed_seconds},
                                   {"threads", threads},
                                   {"tool_version", lchain::kToolVersion}};
    std::ofstream out(out_dir / "run_meta.json", std::ios::binary | std::ios::trunc);
    out << meta.dump(2) << "\n";
}

int run(lchain::ExperimentKind kind, const Options& opt) {
    using namespace lchain;
    try {
        ExperimentConfig config = parse_config_file(opt.config_path);
        if (config.kind != kind)
            throw ConfigError("config experiment kind '" + to_string(config.kind) +
                              "' does not match subcommand '" + to_string(kind) + "'");
        if (opt.seed_set) config.master_seed = opt.seed;

        const int threads =
            opt.threads > 0 ? opt.threads : int(std::thread::hardware_concurrency());
        const auto start = std::chrono::steady_clock::now();
        const RunResult result = run_experiment(config, opt.out_dir, std::max(1, threads));
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_run_meta(opt.out_dir, elapsed, threads);

        std::cout << to_string(kind) << ": wrote";
        for (const auto& artifact : result.artifacts) std::cout << " " << artifact;
        std::cout << " to " << opt.out_dir << "\n";
        if (result.exit_code != 0) {
            std::cerr << "gate failure: see the gates block in results.json\n";
        }
        return result.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "convergence failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"single-photon gene replication simulator"};
    app.require_subcommand(1);

    Options opt;
    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opt.config_path, "JSON experiment config")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--out", opt.out_dir, "output directory")->required();
        cmd->add_option("--seed", opt.seed, "override the config master seed")
            ->each([&](const std::string&) { opt.seed_set = true; });
        cmd->add_option("--threads", opt.threads, "worker threads (default: hardware)");
    };

    using lchain::ExperimentKind;
    std::pair<const char*, ExperimentKind> kinds[] = {
        {"analytic", ExperimentKind::Analytic}, {"dynamics", ExperimentKind::Dynamics},
        {"oracle", ExperimentKind::Oracle},     {"chain", ExperimentKind::Chain},
        {"sweep", ExperimentKind::Sweep}};
    for (const auto& [name, kind] : kinds) add_common(app.add_subcommand(name));

    CLI11_PARSE(app, argc, argv);

    for (const auto& [name, kind] : kinds)
        if (app.get_subcommand(name)->parsed()) return run(kind, opt);
    return 1;
}
