#include "lchain/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "lchain/csv.hpp"
#include "lchain/mode_oracle.hpp"

namespace lchain {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct GateSet {
    ordered_json doc = ordered_json::object();
    bool all_pass = true;

    void add(const std::string& name, double value, double threshold) {
        const bool pass = value <= threshold;
        doc[name] = {{"value", value}, {"threshold", threshold}, {"pass", pass}};
        all_pass = all_pass && pass;
    }
};

void write_json(const fs::path& path, const ordered_json& doc) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << doc.dump(2) << "\n";
}

ordered_json document_skeleton(const ExperimentConfig& config) {
    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = to_string(config.kind);
    doc["config"] = config.echo();
    return doc;
}

int stride_for(Eigen::Index n, Eigen::Index max_rows = 20000) {
    return int(std::max<Eigen::Index>(1, (n + max_rows - 1) / max_rows));
}

// ---------------------------------------------------------------- analytic

RunResult run_analytic(const ExperimentConfig& config, const fs::path& out_dir) {
    RunResult result;
    CsvWriter csv((out_dir / "analytic.csv").string(), "analytic_probability", kSchemaVersion,
                  {"delta_pulse", "detuning", "probability"});
    double p_min = 1.0, p_max = 0.0;
    for (double delta : config.analytic.delta_pulse) {
        for (double det : config.analytic.detuning) {
            const double p = transition_probability(delta, det, config.model.gamma);
            p_min = std::min(p_min, p);
            p_max = std::max(p_max, p);
            csv.row({delta, det, p});
        }
    }
    result.artifacts.push_back("analytic.csv");

    ordered_json doc = document_skeleton(config);
    doc["results"] = {{"points", config.analytic.delta_pulse.size() * config.analytic.detuning.size()},
                      {"probability_min", p_min},
                      {"probability_max", p_max}};
    GateSet gates;
    gates.add("probability_range", std::max(p_max - 1.0, -p_min), 0.0);
    doc["gates"] = gates.doc;
    result.document = doc;
    result.exit_code = gates.all_pass ? 0 : 3;
    return result;
}

// ---------------------------------------------------------------- dynamics

ordered_json dynamics_results(const ExperimentConfig& config, const TimeGrid& grid,
                              const AmplitudeSeries& series, const ProbabilityCurve& curve,
                              const Eigen::ArrayXd& residual, GateSet& gates) {
    const ModelParams& model = config.model;
    ordered_json res;
    res["branch"] = series.branch == Branch::A ? "A" : "B";
    res["detuning"] = series.detuning;
    res["frame_shift"] = series.frame_shift;
    res["grid"] = {{"t_max", series.t[series.t.size() - 1]}, {"dt", series.dt()}};
    res["p_end"] = curve.p_end;
    res["tail_mass"] = curve.tail_mass;
    res["p_infinity"] = curve.p_infinity;
    if (config.pulse.shape() == PulseShape::ExponentialDecay)
        res["closed_form_p"] =
            transition_probability(config.pulse.linewidth(), series.detuning, model.gamma);

    const double amp_final = std::abs(series.amp[series.amp.size() - 1]);
    const double residual_max = residual.size() ? residual.maxCoeff() : 0.0;
    res["amp_final_abs"] = amp_final;
    res["conservation_max_residual"] = residual_max;

    gates.add("conservation", residual_max, 1e-6);
    gates.add("amplitude_converged", amp_final, 1e-6);

    if (series.branch == Branch::A) {
        bool jumps = false;
        const WorkBreakdown w = work_breakdown(series, config.pulse, model, &jumps);
        res["w_in"] = w.w_in;
        res["w_abs"] = w.w_abs;
        res["w_reac"] = w.w_reac;
        res["envelope_jumps"] = jumps;
        const double w_scale = std::max({std::abs(w.w_in), std::abs(w.w_abs), 1e-12});
        gates.add("work_consistency", std::abs(w.w_in - (w.w_abs + w.w_reac)) / w_scale, 1e-6);
        if (amp_final < 1e-6) {
            const double da = da_residual(model, config.pulse, grid);
            res["da_residual"] = da;
            gates.add("da_identity", da, 1e-3);
        }
    }
    return res;
}

RunResult run_dynamics(const ExperimentConfig& config, const fs::path& out_dir) {
    RunResult result;
    const TimeGrid grid = config.grid ? *config.grid
                                      : auto_grid(config.model, config.pulse, config.branch);
    const AmplitudeSeries series = evolve_branch(config.model, config.pulse, config.branch, grid);
    const ProbabilityCurve curve = accumulate_probability(series, config.model.gamma);
    const Eigen::ArrayXd residual = conservation_residual_series(series, config.pulse, config.model);

    GateSet gates;
    ordered_json res = dynamics_results(config, grid, series, curve, residual, gates);
    gates.add("step_halving",
              convergence_error(config.model, config.pulse, config.branch, grid), 1e-6);

    if (config.output.series_csv) {
        CsvWriter csv((out_dir / "series.csv").string(), "dynamics_series", kSchemaVersion,
                      {"t", "amp_re", "amp_im", "p_accum", "residual"});
        const int stride = stride_for(series.t.size());
        for (Eigen::Index i = 0; i < series.t.size(); i += stride)
            csv.row({series.t[i], series.amp[i].real(), series.amp[i].imag(), curve.p[i],
                     residual[i]});
        result.artifacts.push_back("series.csv");
    }

    ordered_json doc = document_skeleton(config);
    doc["results"] = res;
    doc["gates"] = gates.doc;
    result.document = doc;
    result.exit_code = gates.all_pass ? 0 : 3;
    return result;
}

// ------------------------------------------------------------------ oracle

RunResult run_oracle(const ExperimentConfig& config, const fs::path& out_dir) {
    RunResult result;
    const ModelParams& model = config.model;
    const OracleConfig& oc = config.oracle;

    const ModeGrid grid =
        build_mode_grid(model.gamma, model.omega_L, oc.halfwidth, oc.modes, config.pulse);
    const double max_rate = oc.halfwidth + std::abs(model.delta_a0) +
                            std::abs(model.coupling_J) + model.gamma;
    const double dt = oc.dt > 0.0 ? oc.dt : std::min(1e-3 / model.gamma, 0.08 / max_rate);
    const double t_max = oc.t_max > 0.0
                             ? oc.t_max
                             : config.pulse.support_end() + 16.0 / model.gamma;

    const OracleTrajectory traj =
        integrate_full(grid, model, config.pulse, config.branch, dt, t_max);

    CsvWriter csv((out_dir / "oracle.csv").string(), "oracle_observables", kSchemaVersion,
                  {"t", "p_flip", "p_keep", "excited_pop", "norm"});
    for (Eigen::Index i = 0; i < traj.t.size(); ++i)
        csv.row({traj.t[i], traj.p_flip[i], traj.p_keep[i], traj.excited_pop[i], traj.norm[i]});
    result.artifacts.push_back("oracle.csv");

    GateSet gates;
    gates.add("norm_conservation", traj.max_norm_drift, 1e-6);

    ordered_json res;
    res["grid"] = {{"modes", grid.modes},
                   {"halfwidth", grid.halfwidth},
                   {"rho", grid.rho},
                   {"g", grid.g},
                   {"dt", dt},
                   {"t_max", t_max}};
    res["p_flip_end"] = traj.p_flip[traj.p_flip.size() - 1];
    res["p_keep_end"] = traj.p_keep[traj.p_keep.size() - 1];
    res["norm_drift"] = traj.max_norm_drift;

    if (oc.compare_dynamics) {
        const AmplitudeSeries reduced = evolve_branch(model, config.pulse, config.branch,
                                                      TimeGrid{t_max, dt});
        const ProbabilityCurve curve = accumulate_probability(reduced, model.gamma);
        double amp_dev = 0.0, amp_scale = 0.0, p_dev = 0.0;
        for (Eigen::Index i = 0; i < traj.t.size(); ++i) {
            const double ref = std::abs(reduced.at(traj.t[i]));
            amp_scale = std::max(amp_scale, ref);
            amp_dev = std::max(amp_dev, std::abs(std::abs(traj.excited[i]) - ref));
            const auto k = static_cast<Eigen::Index>(std::llround(traj.t[i] / reduced.dt()));
            if (k < curve.p.size())
                p_dev = std::max(p_dev, std::abs(traj.p_flip[i] - curve.p[k]));
        }
        res["reduced_comparison"] = {{"max_amp_dev", amp_dev},
                                     {"amp_scale", amp_scale},
                                     {"max_p_dev", p_dev},
                                     {"p_end_reduced", curve.p_end}};
        gates.add("oracle_vs_reduced_p", p_dev, 0.01);
    }

    if (!oc.resolutions.empty()) {
        const auto table =
            ww_discrepancy(model, config.pulse, config.branch, oc.resolutions, dt, t_max);
        ordered_json rows = ordered_json::array();
        for (const auto& row : table)
            rows.push_back({{"modes", row.modes},
                            {"halfwidth", row.halfwidth},
                            {"max_amp_dev", row.max_amp_dev},
                            {"p_end_dev", row.p_end_dev},
                            {"norm_drift", row.norm_drift},
                            {"converging", row.converging}});
        res["discrepancy_table"] = rows;
        write_json(out_dir / "discrepancy.json", rows);
        result.artifacts.push_back("discrepancy.json");
    }

    ordered_json doc = document_skeleton(config);
    doc["results"] = res;
    doc["gates"] = gates.doc;
    result.document = doc;
    result.exit_code = gates.all_pass ? 0 : 3;
    return result;
}

// ------------------------------------------------------------------- chain

RunResult run_chain(const ExperimentConfig& config, const fs::path& out_dir, int threads) {
    RunResult result;
    const ChainConfig& cc = *config.chain;
    const GeneString gene = GeneString::from_string(cc.gene);
    const DistanceProfile profile{cc.distances, cc.law};

    const EnsembleStats stats = ensemble_stats(gene, profile, cc.disorder, config.model,
                                               cc.trials, config.master_seed, threads);

    if (config.output.per_trial_csv) {
        CsvWriter csv((out_dir / "trials.csv").string(), "chain_trials", kSchemaVersion,
                      {"trial", "fidelity", "mutations", "replicated", "absorbed_work"});
        for (std::uint64_t t = 0; t < cc.trials; ++t) {
            const OutcomeRecord rec =
                replicate_gene(gene, profile, cc.disorder, config.model, config.master_seed, t);
            csv.row({csv_num(t), csv_num(rec.fidelity(gene)),
                     std::to_string(rec.mutation_count()), std::to_string(rec.replicated_count()),
                     csv_num(rec.total_work())});
        }
        result.artifacts.push_back("trials.csv");
    }

    std::uint64_t histogram_mass = 0;
    ordered_json histogram = ordered_json::array();
    for (std::size_t k = 0; k < stats.mutation_histogram.size(); ++k) {
        histogram_mass += stats.mutation_histogram[k];
        if (stats.mutation_histogram[k]) histogram.push_back({k, stats.mutation_histogram[k]});
    }

    ordered_json res;
    res["trials"] = stats.trials;
    res["fidelity_mean"] = stats.fidelity_mean;
    res["fidelity_ci_halfwidth"] = stats.fidelity_ci_halfwidth;
    res["replication_rate"] = stats.replication_rate;
    res["mutation_rate"] = stats.mutation_rate;
    res["mean_total_work"] = stats.mean_total_work;
    res["mean_work_per_a_base"] = stats.mean_work_per_a_base;
    res["mutation_histogram"] = histogram;  // [count, trials] pairs, zero rows elided

    GateSet gates;
    gates.add("histogram_mass", std::abs(double(histogram_mass) - double(stats.trials)), 0.0);
    gates.add("fidelity_range",
              std::max(stats.fidelity_mean - 1.0, -stats.fidelity_mean), 0.0);

    ordered_json doc = document_skeleton(config);
    doc["results"] = res;
    doc["gates"] = gates.doc;
    result.document = doc;
    result.exit_code = gates.all_pass ? 0 : 3;
    return result;
}

// ------------------------------------------------------------------- sweep

RunResult run_sweep(const ExperimentConfig& config, const fs::path& out_dir, int threads) {
    RunResult result;
    const bool dynamics_target = config.sweep_target == "dynamics";

    std::vector<std::size_t> shape;
    std::size_t total = 1;
    for (const auto& axis : config.sweep_axes) {
        shape.push_back(axis.values.size());
        total *= axis.values.size();
    }

    struct Row {
        std::vector<double> cells;
        bool gate_pass = true;
        double da = 0.0, conservation = 0.0;
    };
    std::vector<Row> rows(total);

    auto point_values = [&](std::size_t flat) {
        std::vector<double> values(config.sweep_axes.size());
        for (std::size_t a = config.sweep_axes.size(); a-- > 0;) {
            values[a] = config.sweep_axes[a].values[flat % shape[a]];
            flat /= shape[a];
        }
        return values;
    };

    auto run_point = [&](std::size_t index) {
        const std::vector<double> values = point_values(index);
        ExperimentConfig local = config;
        for (std::size_t a = 0; a < config.sweep_axes.size(); ++a)
            apply_sweep_override(local, config.sweep_axes[a].parameter, values[a]);

        Row row;
        row.cells = values;
        if (dynamics_target) {
            const TimeGrid grid = local.grid ? *local.grid
                                             : auto_grid(local.model, local.pulse, local.branch);
            const AmplitudeSeries series =
                evolve_branch(local.model, local.pulse, local.branch, grid);
            const ProbabilityCurve curve = accumulate_probability(series, local.model.gamma);
            row.conservation =
                conservation_residual_series(series, local.pulse, local.model).maxCoeff();
            row.cells.push_back(curve.p_infinity);
            if (local.branch == Branch::A) {
                const WorkBreakdown w = work_breakdown(series, local.pulse, local.model);
                const double da = da_residual(local.model, local.pulse, grid);
                row.da = da;
                row.cells.insert(row.cells.end(), {da, w.w_abs, w.w_reac});
            }
            row.cells.push_back(row.conservation);
            row.gate_pass = row.conservation <= 1e-6 && row.da <= 1e-3;
        } else {
            const BranchProbabilities bp = branch_probabilities(
                local.model, local.pulse.shape() == PulseShape::ExponentialDecay
                                 ? local.pulse.linewidth()
                                 : local.pulse.effective_linewidth());
            row.cells.insert(row.cells.end(), {bp.p_rep, bp.p_fail, bp.p_dorm, bp.p_mut});
        }
        rows[index] = std::move(row);
    };

    const int n_workers = std::max(1, std::min<int>(threads, int(total)));
    if (n_workers == 1) {
        for (std::size_t i = 0; i < total; ++i) run_point(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1))
                    run_point(i);
            });
        for (auto& th : pool) th.join();
    }

    std::vector<std::string> columns;
    for (const auto& axis : config.sweep_axes) columns.push_back(axis.parameter);
    if (dynamics_target) {
        columns.push_back("p_infinity");
        if (config.branch == Branch::A) {
            columns.insert(columns.end(), {"da_residual", "w_abs", "w_reac"});
        }
        columns.push_back("conservation_max");
    } else {
        columns.insert(columns.end(), {"p_rep", "p_fail", "p_dorm", "p_mut"});
    }

    CsvWriter csv((out_dir / "sweep.csv").string(), "sweep", kSchemaVersion, columns);
    double worst_da = 0.0, worst_conservation = 0.0;
    bool all_pass = true;
    for (const Row& row : rows) {  // row order = sweep index order, not completion order
        csv.row(row.cells);
        worst_da = std::max(worst_da, row.da);
        worst_conservation = std::max(worst_conservation, row.conservation);
        all_pass = all_pass && row.gate_pass;
    }
    result.artifacts.push_back("sweep.csv");

    ordered_json doc = document_skeleton(config);
    doc["results"] = {{"points", total}};
    GateSet gates;
    if (dynamics_target) {
        gates.add("conservation_worst", worst_conservation, 1e-6);
        if (config.branch == Branch::A) gates.add("da_identity_worst", worst_da, 1e-3);
    }
    gates.all_pass = gates.all_pass && all_pass;
    doc["gates"] = gates.doc;
    result.document = doc;
    result.exit_code = gates.all_pass ? 0 : 3;
    return result;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, const fs::path& out_dir, int threads) {
    fs::create_directories(out_dir);
    RunResult result;
    switch (config.kind) {
        case ExperimentKind::Analytic: result = run_analytic(config, out_dir); break;
        case ExperimentKind::Dynamics: result = run_dynamics(config, out_dir); break;
        case ExperimentKind::Oracle: result = run_oracle(config, out_dir); break;
        case ExperimentKind::Chain: result = run_chain(config, out_dir, threads); break;
        case ExperimentKind::Sweep: result = run_sweep(config, out_dir, threads); break;
    }
    write_json(out_dir / "results.json", result.document);
    result.artifacts.insert(result.artifacts.begin(), "results.json");
    return result;
}

}  // namespace lchain
