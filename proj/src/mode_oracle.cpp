#include "lchain/mode_oracle.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lchain {

namespace {

constexpr double kPhaseGate = 0.1;
constexpr double kNormGate = 1e-6;

void check_grid_args(double gamma, double halfwidth, int modes) {
    if (!(gamma > 0.0)) throw std::invalid_argument("build_mode_grid: gamma must be > 0");
    if (modes < 401) throw std::invalid_argument("build_mode_grid: need at least 401 modes");
    if (modes % 2 == 0) throw std::invalid_argument("build_mode_grid: mode count must be odd");
    if (!(halfwidth >= 10.0 * gamma))
        throw std::invalid_argument("build_mode_grid: halfwidth must be >= 10 gamma");
}

}  // namespace

ModeGrid build_mode_grid(double gamma, double omega_L, double halfwidth, int modes) {
    check_grid_args(gamma, halfwidth, modes);
    ModeGrid grid;
    grid.gamma = gamma;
    grid.omega_L = omega_L;
    grid.halfwidth = halfwidth;
    grid.modes = modes;
    grid.domega = 2.0 * halfwidth / double(modes);
    grid.rho = 1.0 / grid.domega;
    grid.g = std::sqrt(gamma * grid.domega / (2.0 * M_PI));
    grid.omega = Eigen::ArrayXd::LinSpaced(modes, 0.0, double(modes - 1));
    grid.omega = omega_L + (grid.omega - double(modes - 1) / 2.0) * grid.domega;
    return grid;
}

ModeGrid build_mode_grid(double gamma, double omega_L, double halfwidth, int modes,
                         const PulseSpec& pulse) {
    const double spectral_scale = pulse.bandwidth();
    if (4.0 * spectral_scale > halfwidth) {
        std::ostringstream msg;
        msg << "build_mode_grid: comb halfwidth " << halfwidth
            << " too small for pulse spectral scale " << spectral_scale;
        throw std::invalid_argument(msg.str());
    }
    return build_mode_grid(gamma, omega_L, halfwidth, modes);
}

FullState initial_state(const ModeGrid& grid, const PulseSpec& pulse) {
    FullState s;
    s.photon_b = Eigen::ArrayXcd::Zero(grid.modes);
    s.photon_a = Eigen::ArrayXcd::Zero(grid.modes);
    s.excited = 0.0;
    if (pulse.shape() == PulseShape::Vacuum) return s;

    if (pulse.has_analytic_spectral_cdf()) {
        // Bin-integrated masses from shared edge values (sum telescopes to 1
        // exactly); the two edge bins absorb the residual tails so the comb
        // carries exactly one photon.
        Eigen::ArrayXd edge_cdf(grid.modes + 1);
        edge_cdf[0] = 0.0;
        edge_cdf[grid.modes] = 1.0;
        for (int j = 1; j < grid.modes; ++j)
            edge_cdf[j] = pulse.spectral_cdf(grid.omega[j] - grid.omega_L - 0.5 * grid.domega);
        for (int j = 0; j < grid.modes; ++j) {
            const double mass = std::max(0.0, edge_cdf[j + 1] - edge_cdf[j]);
            std::complex<double> phase = pulse.spectrum(grid.omega[j] - grid.omega_L);
            const double len = std::abs(phase);
            phase = len > 1e-300 ? phase / len : 1.0;
            s.photon_b[j] = std::sqrt(mass) * phase;
        }
    } else {
        for (int j = 0; j < grid.modes; ++j)
            s.photon_b[j] = pulse.spectrum(grid.omega[j] - grid.omega_L);
        const double norm = std::sqrt(s.photon_b.abs2().sum());
        if (norm <= 0.0)
            throw std::invalid_argument("initial_state: pulse spectrum vanishes on the comb");
        s.photon_b /= norm;
    }
    return s;
}

OracleObservables oracle_observables(const FullState& state) {
    OracleObservables o;
    o.p_flip = state.photon_a.abs2().sum();
    o.p_keep = state.photon_b.abs2().sum();
    o.excited_pop = std::norm(state.excited);
    o.norm = o.p_flip + o.p_keep + o.excited_pop;
    return o;
}

OracleTrajectory integrate_full(const ModeGrid& grid, const ModelParams& params,
                                const PulseSpec& pulse, Branch branch, double dt, double t_max,
                                int record_stride) {
    return integrate_full_from(grid, params, initial_state(grid, pulse), branch, dt, t_max,
                               record_stride);
}

OracleTrajectory integrate_full_from(const ModeGrid& grid, const ModelParams& params,
                                     FullState state, Branch branch, double dt, double t_max,
                                     int record_stride) {
    params.validate();
    if (!(dt > 0.0) || !(t_max > 0.0))
        throw std::invalid_argument("integrate_full: need dt > 0 and t_max > 0");
    if (std::abs(params.gamma - grid.gamma) > 1e-12 * grid.gamma)
        throw std::invalid_argument("integrate_full: grid was built for a different gamma");

    // Rotating-frame detunings of every sector state (carrier omega_L removed).
    const Eigen::ArrayXd nu = grid.omega - grid.omega_L;
    Eigen::ArrayXd diag_b, diag_a;
    double diag_e;
    if (branch == Branch::A) {
        diag_b = nu + params.delta_a0;
        diag_e = params.delta_a0 - branch_detuning(params, Branch::A);
        diag_a = nu + 2.0 * params.delta_a0 - params.coupling_J;
    } else {
        diag_b = nu;
        diag_e = -branch_detuning(params, Branch::B);
        diag_a = nu + params.delta_a0;
    }
    const double max_rate = std::max({diag_b.abs().maxCoeff(), diag_a.abs().maxCoeff(),
                                      std::abs(diag_e), params.gamma});
    if (dt * max_rate > kPhaseGate) {
        std::ostringstream msg;
        msg << "integrate_full: dt " << dt << " too coarse for rotating-frame rate " << max_rate;
        throw std::invalid_argument(msg.str());
    }

    const auto n_steps = static_cast<Eigen::Index>(std::ceil(t_max / dt - 1e-9));
    if (record_stride <= 0)
        record_stride = std::max<int>(1, int(n_steps / 2000));
    const Eigen::Index n_records = n_steps / record_stride + 1;

    OracleTrajectory traj;
    traj.branch = branch;
    traj.t.resize(n_records);
    traj.p_flip.resize(n_records);
    traj.p_keep.resize(n_records);
    traj.excited_pop.resize(n_records);
    traj.norm.resize(n_records);
    traj.excited.resize(n_records);

    const double g = grid.g;
    const std::complex<double> i_unit(0.0, 1.0);
    const Eigen::ArrayXcd mib = -i_unit * diag_b.cast<std::complex<double>>();
    const Eigen::ArrayXcd mia = -i_unit * diag_a.cast<std::complex<double>>();
    const std::complex<double> mie = -i_unit * diag_e;

    Eigen::ArrayXcd b = state.photon_b, a = state.photon_a;
    std::complex<double> e = state.excited;

    // RK4 stage buffers
    Eigen::ArrayXcd kb1(grid.modes), kb2(grid.modes), kb3(grid.modes), kb4(grid.modes);
    Eigen::ArrayXcd ka1(grid.modes), ka2(grid.modes), ka3(grid.modes), ka4(grid.modes);
    Eigen::ArrayXcd tb(grid.modes), ta(grid.modes);
    std::complex<double> ke1, ke2, ke3, ke4;

    auto rhs = [&](const Eigen::ArrayXcd& xb, const std::complex<double>& xe,
                   const Eigen::ArrayXcd& xa, Eigen::ArrayXcd& db, std::complex<double>& de,
                   Eigen::ArrayXcd& da) {
        db = mib * xb + g * xe;
        da = mia * xa + g * xe;
        de = mie * xe - g * (xb.sum() + xa.sum());
    };

    Eigen::Index rec = 0;
    auto record = [&](double t_now) {
        FullState snap{b, e, a};
        const OracleObservables o = oracle_observables(snap);
        traj.t[rec] = t_now;
        traj.p_flip[rec] = o.p_flip;
        traj.p_keep[rec] = o.p_keep;
        traj.excited_pop[rec] = o.excited_pop;
        traj.norm[rec] = o.norm;
        traj.excited[rec] = e;
        traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(o.norm - 1.0));
        ++rec;
    };

    const double norm0 = state.norm_sq();
    const bool vacuum = norm0 < 1e-12;
    record(0.0);

    for (Eigen::Index step = 0; step < n_steps; ++step) {
        rhs(b, e, a, kb1, ke1, ka1);
        tb = b + 0.5 * dt * kb1;
        ta = a + 0.5 * dt * ka1;
        rhs(tb, e + 0.5 * dt * ke1, ta, kb2, ke2, ka2);
        tb = b + 0.5 * dt * kb2;
        ta = a + 0.5 * dt * ka2;
        rhs(tb, e + 0.5 * dt * ke2, ta, kb3, ke3, ka3);
        tb = b + dt * kb3;
        ta = a + dt * ka3;
        rhs(tb, e + dt * ke3, ta, kb4, ke4, ka4);

        b += dt / 6.0 * (kb1 + 2.0 * (kb2 + kb3) + kb4);
        a += dt / 6.0 * (ka1 + 2.0 * (ka2 + ka3) + ka4);
        e += dt / 6.0 * (ke1 + 2.0 * (ke2 + ke3) + ke4);

        if ((step + 1) % record_stride == 0 && rec < n_records) {
            record(double(step + 1) * dt);
            if (!vacuum && traj.max_norm_drift > kNormGate) {
                std::ostringstream msg;
                msg << "integrate_full: norm drift " << traj.max_norm_drift
                    << " exceeds " << kNormGate << ", step-size failure";
                throw std::runtime_error(msg.str());
            }
        }
    }
    traj.t.conservativeResize(rec);
    traj.p_flip.conservativeResize(rec);
    traj.p_keep.conservativeResize(rec);
    traj.excited_pop.conservativeResize(rec);
    traj.norm.conservativeResize(rec);
    traj.excited.conservativeResize(rec);
    traj.final_state = FullState{std::move(b), e, std::move(a)};
    return traj;
}

std::vector<DiscrepancyRow> ww_discrepancy(const ModelParams& params, const PulseSpec& pulse,
                                           Branch branch,
                                           const std::vector<std::pair<int, double>>& resolutions,
                                           double dt, double t_max) {
    if (resolutions.size() < 2)
        throw std::invalid_argument("ww_discrepancy: need at least two comb resolutions");

    const AmplitudeSeries reduced = evolve_branch(params, pulse, branch, TimeGrid{t_max, dt});
    const ProbabilityCurve p_reduced = accumulate_probability(reduced, params.gamma);

    std::vector<DiscrepancyRow> table;
    for (const auto& [modes, halfwidth] : resolutions) {
        const ModeGrid grid = build_mode_grid(params.gamma, params.omega_L, halfwidth, modes, pulse);
        const OracleTrajectory traj = integrate_full(grid, params, pulse, branch, dt, t_max);

        DiscrepancyRow row;
        row.modes = modes;
        row.halfwidth = halfwidth;
        row.norm_drift = traj.max_norm_drift;
        for (Eigen::Index i = 0; i < traj.t.size(); ++i) {
            const double dev = std::abs(std::abs(traj.excited[i]) - std::abs(reduced.at(traj.t[i])));
            row.max_amp_dev = std::max(row.max_amp_dev, dev);
        }
        const double p_r = p_reduced.p.size() ? p_reduced.p[p_reduced.p.size() - 1] : 0.0;
        row.p_end_dev = std::abs(traj.p_flip[traj.p_flip.size() - 1] - p_r);
        if (!table.empty())
            row.converging = row.max_amp_dev <= table.back().max_amp_dev + 1e-12;
        table.push_back(row);
    }
    return table;
}

}  // namespace lchain
