#include "lchain/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace lchain {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Analytic: return "analytic";
        case ExperimentKind::Dynamics: return "dynamics";
        case ExperimentKind::Oracle: return "oracle";
        case ExperimentKind::Chain: return "chain";
        case ExperimentKind::Sweep: return "sweep";
    }
    return "analytic";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    if (name == "analytic") return ExperimentKind::Analytic;
    if (name == "dynamics") return ExperimentKind::Dynamics;
    if (name == "oracle") return ExperimentKind::Oracle;
    if (name == "chain") return ExperimentKind::Chain;
    if (name == "sweep") return ExperimentKind::Sweep;
    throw ConfigError("experiment: unknown kind '" + name +
                      "' (expected analytic|dynamics|oracle|chain|sweep)");
}

namespace {

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* k) { return it.key() == k; }) == allowed.end())
            throw ConfigError("unknown key: " + (path.empty() ? it.key() : path + "." + it.key()));
    }
}

double get_number(const json& obj, const std::string& path, const char* key, double fallback,
                  bool required = false) {
    if (!obj.contains(key)) {
        if (required) throw ConfigError(path + "." + key + " is required");
        return fallback;
    }
    if (!obj[key].is_number())
        throw ConfigError(path + "." + key + " must be a number");
    return obj[key].get<double>();
}

std::vector<double> get_number_list(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) return {};
    if (!obj[key].is_array()) throw ConfigError(path + "." + key + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : obj[key]) {
        if (!v.is_number()) throw ConfigError(path + "." + key + " must be an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

ModelParams parse_model(const json& obj) {
    check_keys(obj, "model", {"gamma", "omega_b0", "delta_a0", "omega_L", "coupling_J"});
    ModelParams p;
    p.gamma = get_number(obj, "model", "gamma", 1.0);
    p.omega_b0 = get_number(obj, "model", "omega_b0", 0.0);
    p.delta_a0 = get_number(obj, "model", "delta_a0", 0.0);
    // no physical default for the source frequency: it must be declared
    p.omega_L = get_number(obj, "model", "omega_L", 0.0, /*required=*/true);
    p.coupling_J = get_number(obj, "model", "coupling_J", 0.0);
    try {
        p.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
    return p;
}

PulseSpec parse_pulse(const json& obj) {
    check_keys(obj, "pulse",
               {"shape", "linewidth", "sigma", "front_sigmas", "duration", "t_begin", "dt", "re",
                "im"});
    if (!obj.contains("shape") || !obj["shape"].is_string())
        throw ConfigError("pulse.shape is required (vacuum|exponential|gaussian|rectangular|sampled)");
    const std::string shape = obj["shape"].get<std::string>();
    try {
        if (shape == "vacuum") return PulseSpec::vacuum();
        if (shape == "exponential")
            return PulseSpec::exponential(get_number(obj, "pulse", "linewidth", 0.0, true));
        if (shape == "gaussian")
            return PulseSpec::gaussian(get_number(obj, "pulse", "sigma", 0.0, true),
                                       get_number(obj, "pulse", "front_sigmas", 8.0));
        if (shape == "rectangular")
            return PulseSpec::rectangular(get_number(obj, "pulse", "duration", 0.0, true));
        if (shape == "sampled") {
            const std::vector<double> re = get_number_list(obj, "pulse", "re");
            const std::vector<double> im = get_number_list(obj, "pulse", "im");
            if (re.empty() || (!im.empty() && im.size() != re.size()))
                throw ConfigError("pulse: sampled shape needs re[] (and im[] of equal length)");
            Eigen::ArrayXcd values(re.size());
            for (std::size_t i = 0; i < re.size(); ++i)
                values[Eigen::Index(i)] = {re[i], im.empty() ? 0.0 : im[i]};
            return PulseSpec::sampled(get_number(obj, "pulse", "t_begin", 0.0),
                                      get_number(obj, "pulse", "dt", 0.0, true), values);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("pulse: ") + e.what());
    }
    throw ConfigError("pulse.shape: unknown shape '" + shape + "'");
}

DisorderSpec parse_disorder(const json& obj) {
    check_keys(obj, "chain.disorder", {"kind", "delta", "min", "max", "shape", "scale"});
    if (!obj.contains("kind") || !obj["kind"].is_string())
        throw ConfigError("chain.disorder.kind is required (fixed|log_uniform|gamma)");
    const std::string kind = obj["kind"].get<std::string>();
    try {
        if (kind == "fixed")
            return DisorderSpec::fixed(get_number(obj, "chain.disorder", "delta", 0.0, true));
        if (kind == "log_uniform")
            return DisorderSpec::log_uniform(get_number(obj, "chain.disorder", "min", 0.0, true),
                                             get_number(obj, "chain.disorder", "max", 0.0, true));
        if (kind == "gamma")
            return DisorderSpec::gamma_family(get_number(obj, "chain.disorder", "shape", 0.0, true),
                                              get_number(obj, "chain.disorder", "scale", 0.0, true));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("chain.disorder: ") + e.what());
    }
    throw ConfigError("chain.disorder.kind: unknown kind '" + kind + "'");
}

ChainConfig parse_chain(const json& obj) {
    check_keys(obj, "chain", {"gene", "distance", "distances", "coupling", "disorder", "trials"});
    ChainConfig c;
    if (!obj.contains("gene") || !obj["gene"].is_string())
        throw ConfigError("chain.gene is required (string over {A,B})");
    c.gene = obj["gene"].get<std::string>();
    try {
        GeneString::from_string(c.gene);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("chain.gene: ") + e.what());
    }

    if (obj.contains("coupling")) {
        check_keys(obj["coupling"], "chain.coupling", {"j0", "r0"});
        c.law.j0 = get_number(obj["coupling"], "chain.coupling", "j0", 0.0, true);
        c.law.r0 = get_number(obj["coupling"], "chain.coupling", "r0", 1.0);
    }
    try {
        c.law.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("chain.coupling: ") + e.what());
    }

    if (obj.contains("distances")) {
        c.distances = get_number_list(obj, "chain", "distances");
    } else {
        const double r = get_number(obj, "chain", "distance", 0.0, true);
        c.distances.assign(c.gene.size(), r);
    }
    if (c.distances.size() != c.gene.size())
        throw ConfigError("chain.distances: length must match the gene length");
    try {
        DistanceProfile{c.distances, c.law}.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("chain.distances: ") + e.what());
    }

    if (!obj.contains("disorder")) throw ConfigError("chain.disorder is required");
    c.disorder = parse_disorder(obj["disorder"]);

    const double trials = get_number(obj, "chain", "trials", double(c.trials));
    if (!(trials >= 1.0) || trials != std::floor(trials))
        throw ConfigError("chain.trials must be a positive integer");
    c.trials = std::uint64_t(trials);
    return c;
}

OracleConfig parse_oracle(const json& obj) {
    check_keys(obj, "oracle",
               {"halfwidth", "modes", "dt", "t_max", "compare_dynamics", "resolutions"});
    OracleConfig o;
    o.halfwidth = get_number(obj, "oracle", "halfwidth", o.halfwidth);
    const double modes = get_number(obj, "oracle", "modes", double(o.modes));
    if (modes != std::floor(modes)) throw ConfigError("oracle.modes must be an integer");
    o.modes = int(modes);
    o.dt = get_number(obj, "oracle", "dt", o.dt);
    o.t_max = get_number(obj, "oracle", "t_max", o.t_max);
    if (obj.contains("compare_dynamics")) {
        if (!obj["compare_dynamics"].is_boolean())
            throw ConfigError("oracle.compare_dynamics must be a boolean");
        o.compare_dynamics = obj["compare_dynamics"].get<bool>();
    }
    if (obj.contains("resolutions")) {
        if (!obj["resolutions"].is_array())
            throw ConfigError("oracle.resolutions must be an array of [modes, halfwidth] pairs");
        for (const auto& pair : obj["resolutions"]) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
                throw ConfigError("oracle.resolutions must be an array of [modes, halfwidth] pairs");
            o.resolutions.emplace_back(pair[0].get<int>(), pair[1].get<double>());
        }
    }
    return o;
}

}  // namespace

const std::vector<std::string>& sweep_parameter_names() {
    static const std::vector<std::string> names = {
        "model.gamma",     "model.omega_b0", "model.delta_a0", "model.omega_L",
        "model.coupling_J", "pulse.linewidth", "pulse.sigma",   "pulse.duration",
        "detuning"};
    return names;
}

void apply_sweep_override(ExperimentConfig& config, const std::string& parameter, double value) {
    try {
        if (parameter == "model.gamma") config.model.gamma = value;
        else if (parameter == "model.omega_b0") config.model.omega_b0 = value;
        else if (parameter == "model.delta_a0") config.model.delta_a0 = value;
        else if (parameter == "model.omega_L") config.model.omega_L = value;
        else if (parameter == "model.coupling_J") config.model.coupling_J = value;
        else if (parameter == "pulse.linewidth") config.pulse = PulseSpec::exponential(value);
        else if (parameter == "pulse.sigma") config.pulse = PulseSpec::gaussian(value);
        else if (parameter == "pulse.duration") config.pulse = PulseSpec::rectangular(value);
        else if (parameter == "detuning") {
            // place the shifted line at the requested detuning from the carrier
            config.model.coupling_J = config.model.omega_L - config.model.omega_b0 - value;
        } else {
            throw ConfigError("sweep.axes: unknown parameter '" + parameter + "'");
        }
        config.model.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("sweep.axes (" + parameter + "): " + e.what());
    }
}

ExperimentConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    check_keys(doc, "",
               {"experiment", "seed", "model", "pulse", "branch", "grid", "analytic", "oracle",
                "chain", "sweep", "output"});

    ExperimentConfig config;
    if (!doc.contains("experiment") || !doc["experiment"].is_string())
        throw ConfigError("experiment is required (analytic|dynamics|oracle|chain|sweep)");
    config.kind = experiment_kind_from_string(doc["experiment"].get<std::string>());

    if (!doc.contains("model")) throw ConfigError("model block is required");
    config.model = parse_model(doc["model"]);

    if (doc.contains("pulse")) {
        config.pulse = parse_pulse(doc["pulse"]);
        config.has_pulse = true;
    }
    const bool needs_pulse = config.kind == ExperimentKind::Dynamics ||
                             config.kind == ExperimentKind::Oracle ||
                             (config.kind == ExperimentKind::Sweep);
    if (needs_pulse && !config.has_pulse)
        throw ConfigError("pulse block is required for " + to_string(config.kind) + " experiments");

    if (doc.contains("branch")) {
        if (!doc["branch"].is_string() ||
            (doc["branch"] != "A" && doc["branch"] != "B"))
            throw ConfigError("branch must be \"A\" or \"B\"");
        config.branch = doc["branch"] == "A" ? Branch::A : Branch::B;
    }

    if (doc.contains("grid")) {
        check_keys(doc["grid"], "grid", {"t_max", "dt"});
        TimeGrid g;
        g.t_max = get_number(doc["grid"], "grid", "t_max", 0.0, true);
        g.dt = get_number(doc["grid"], "grid", "dt", 0.0, true);
        if (!(g.t_max > 0.0) || !(g.dt > 0.0))
            throw ConfigError("grid: t_max and dt must be > 0");
        config.grid = g;
    }

    if (doc.contains("analytic")) {
        check_keys(doc["analytic"], "analytic", {"delta_pulse", "detuning"});
        AnalyticConfig a;
        a.delta_pulse = get_number_list(doc["analytic"], "analytic", "delta_pulse");
        a.detuning = get_number_list(doc["analytic"], "analytic", "detuning");
        if (a.delta_pulse.empty()) a.delta_pulse = config.analytic.delta_pulse;
        if (a.detuning.empty()) a.detuning = config.analytic.detuning;
        for (double d : a.delta_pulse)
            if (!(d >= 0.0))
                throw ConfigError("analytic.delta_pulse: pulse linewidths must be >= 0");
        config.analytic = a;
    }

    if (doc.contains("oracle")) config.oracle = parse_oracle(doc["oracle"]);

    if (doc.contains("chain")) config.chain = parse_chain(doc["chain"]);
    if (config.kind == ExperimentKind::Chain && !config.chain)
        throw ConfigError("chain block is required for chain experiments");

    if (doc.contains("sweep")) {
        check_keys(doc["sweep"], "sweep", {"target", "axes"});
        if (doc["sweep"].contains("target")) {
            const auto target = doc["sweep"]["target"];
            if (!target.is_string() || (target != "analytic" && target != "dynamics"))
                throw ConfigError("sweep.target must be \"analytic\" or \"dynamics\"");
            config.sweep_target = target.get<std::string>();
        }
        if (doc["sweep"].contains("axes")) {
            if (!doc["sweep"]["axes"].is_array()) throw ConfigError("sweep.axes must be an array");
            for (const auto& axis : doc["sweep"]["axes"]) {
                check_keys(axis, "sweep.axes", {"parameter", "values"});
                SweepAxis a;
                if (!axis.contains("parameter") || !axis["parameter"].is_string())
                    throw ConfigError("sweep.axes: each axis needs a parameter name");
                a.parameter = axis["parameter"].get<std::string>();
                const auto& names = sweep_parameter_names();
                if (std::find(names.begin(), names.end(), a.parameter) == names.end())
                    throw ConfigError("sweep.axes: unknown parameter '" + a.parameter + "'");
                a.values = get_number_list(axis, "sweep.axes", "values");
                if (a.values.empty())
                    throw ConfigError("sweep.axes (" + a.parameter + "): values must be nonempty");
                config.sweep_axes.push_back(std::move(a));
            }
        }
    }
    if (config.kind == ExperimentKind::Sweep && config.sweep_axes.empty())
        throw ConfigError("sweep.axes must be nonempty for sweep experiments");

    if (doc.contains("output")) {
        check_keys(doc["output"], "output", {"series_csv", "per_trial_csv"});
        if (doc["output"].contains("series_csv"))
            config.output.series_csv = doc["output"]["series_csv"].get<bool>();
        if (doc["output"].contains("per_trial_csv"))
            config.output.per_trial_csv = doc["output"]["per_trial_csv"].get<bool>();
    }

    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned())
            throw ConfigError("seed must be a nonnegative integer");
        config.master_seed = doc["seed"].get<std::uint64_t>();
    }
    return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

ordered_json ExperimentConfig::echo() const {
    ordered_json doc;
    doc["experiment"] = to_string(kind);
    doc["seed"] = master_seed;
    doc["model"] = {{"gamma", model.gamma},
                    {"omega_b0", model.omega_b0},
                    {"delta_a0", model.delta_a0},
                    {"omega_L", model.omega_L},
                    {"coupling_J", model.coupling_J}};
    if (has_pulse) {
        ordered_json p;
        switch (pulse.shape()) {
            case PulseShape::Vacuum:
                p["shape"] = "vacuum";
                break;
            case PulseShape::ExponentialDecay:
                p["shape"] = "exponential";
                p["linewidth"] = pulse.linewidth();
                break;
            case PulseShape::Gaussian:
                p["shape"] = "gaussian";
                p["sigma"] = pulse.sigma();
                p["front_sigmas"] = pulse.gaussian_center() / pulse.sigma();
                break;
            case PulseShape::Rectangular:
                p["shape"] = "rectangular";
                p["duration"] = pulse.duration();
                break;
            case PulseShape::Sampled:
                p["shape"] = "sampled";
                p["support_end"] = pulse.support_end();
                break;
        }
        p["effective_linewidth"] = pulse.effective_linewidth();
        doc["pulse"] = p;
    }
    doc["branch"] = branch == Branch::A ? "A" : "B";
    if (grid) doc["grid"] = {{"t_max", grid->t_max}, {"dt", grid->dt}};
    switch (kind) {
        case ExperimentKind::Analytic:
            doc["analytic"] = {{"delta_pulse", analytic.delta_pulse},
                               {"detuning", analytic.detuning}};
            break;
        case ExperimentKind::Oracle: {
            ordered_json o = {{"halfwidth", oracle.halfwidth},
                              {"modes", oracle.modes},
                              {"dt", oracle.dt},
                              {"t_max", oracle.t_max},
                              {"compare_dynamics", oracle.compare_dynamics}};
            if (!oracle.resolutions.empty()) {
                ordered_json res = ordered_json::array();
                for (const auto& [m, hw] : oracle.resolutions) res.push_back({m, hw});
                o["resolutions"] = res;
            }
            doc["oracle"] = o;
            break;
        }
        case ExperimentKind::Chain: {
            ordered_json c = {{"gene", chain->gene},
                              {"distances", chain->distances},
                              {"coupling", {{"j0", chain->law.j0}, {"r0", chain->law.r0}}},
                              {"trials", chain->trials}};
            switch (chain->disorder.kind) {
                case DisorderSpec::Kind::Fixed:
                    c["disorder"] = {{"kind", "fixed"}, {"delta", chain->disorder.fixed_delta}};
                    break;
                case DisorderSpec::Kind::LogUniform:
                    c["disorder"] = {{"kind", "log_uniform"},
                                     {"min", chain->disorder.min},
                                     {"max", chain->disorder.max}};
                    break;
                case DisorderSpec::Kind::Gamma:
                    c["disorder"] = {{"kind", "gamma"},
                                     {"shape", chain->disorder.shape},
                                     {"scale", chain->disorder.scale}};
                    break;
            }
            doc["chain"] = c;
            break;
        }
        case ExperimentKind::Sweep: {
            ordered_json axes = ordered_json::array();
            for (const auto& a : sweep_axes)
                axes.push_back({{"parameter", a.parameter}, {"values", a.values}});
            doc["sweep"] = {{"target", sweep_target}, {"axes", axes}};
            break;
        }
        case ExperimentKind::Dynamics:
            break;
    }
    doc["output"] = {{"series_csv", output.series_csv}, {"per_trial_csv", output.per_trial_csv}};
    return doc;
}

}  // namespace lchain
