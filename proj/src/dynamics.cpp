#include "lchain/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "lchain/numerics.hpp"

namespace lchain {

namespace {

constexpr double kPhaseGate = 0.1;  // max phase advance per step, radians

double stiffness_rate(const ModelParams& params, const PulseSpec& pulse, double detuning) {
    return std::max({params.gamma, std::abs(detuning), pulse.bandwidth()});
}

// Snap dt so every envelope discontinuity falls on a grid node.
double align_dt(double dt, const PulseSpec& pulse, double t_max) {
    for (double bp : pulse.breakpoints()) {
        if (bp <= 0.0 || bp > t_max) continue;
        const double n = std::ceil(bp / dt - 1e-9);
        dt = bp / n;
    }
    return dt;
}

// Node indices of the envelope breakpoints, as segment bounds for piecewise
// quadratures. Returns {0, n-1} augmented with interior breakpoints.
std::vector<Eigen::Index> segment_bounds(const AmplitudeSeries& series, const PulseSpec& pulse) {
    std::vector<Eigen::Index> bounds{0};
    const double dt = series.dt();
    const Eigen::Index n = series.t.size();
    for (double bp : pulse.breakpoints()) {
        const auto i = static_cast<Eigen::Index>(std::llround(bp / dt));
        if (i > 0 && i < n - 1 && std::abs(bp - double(i) * dt) < 1e-9 * std::max(1.0, bp))
            bounds.push_back(i);
    }
    bounds.push_back(n - 1);
    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
    return bounds;
}

// Piecewise-Simpson running integral of a node-sampled integrand that may
// jump at segment bounds; the evaluator receives the side to use there.
Eigen::ArrayXd cumulative_piecewise(const std::function<double(Eigen::Index, Side)>& f,
                                    Eigen::Index n, double dt,
                                    const std::vector<Eigen::Index>& bounds) {
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(n);
    for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
        const Eigen::Index i0 = bounds[s], i1 = bounds[s + 1];
        Eigen::ArrayXd loc(i1 - i0 + 1);
        for (Eigen::Index j = i0; j <= i1; ++j)
            loc[j - i0] = f(j, j == i0 ? Side::Right : (j == i1 ? Side::Left : Side::Right));
        const Eigen::ArrayXd c = cumulative_simpson(loc, dt);
        for (Eigen::Index j = i0 + 1; j <= i1; ++j) out[j] = out[i0] + c[j - i0];
    }
    return out;
}

}  // namespace

TimeGrid auto_grid(const ModelParams& params, const PulseSpec& pulse, Branch branch) {
    params.validate();
    const double rate = stiffness_rate(params, pulse, branch_detuning(params, branch));
    // For an exponential envelope the amplitude rides the drive at rate
    // linewidth/2, which can be far slower than the emitter decay; the horizon
    // must outlast the slower of the two for the ring-down gates to converge.
    double slow_rate = params.gamma;
    if (pulse.shape() == PulseShape::ExponentialDecay)
        slow_rate = std::min(0.5 * pulse.linewidth(), params.gamma);
    TimeGrid g;
    g.dt = 0.01 / rate;
    g.t_max = std::max({pulse.support_end(), 15.0 / slow_rate, 4.0 / params.gamma}) +
              16.0 / params.gamma;
    return g;
}

std::complex<double> AmplitudeSeries::at(double time) const {
    if (t.size() == 0 || time < t[0] || time > t[t.size() - 1]) return 0.0;
    const double step = dt();
    if (step <= 0.0) return amp[0];
    const double x = (time - t[0]) / step;
    const auto i = static_cast<Eigen::Index>(std::floor(x));
    if (i + 1 >= t.size()) return amp[t.size() - 1];
    const double w = x - double(i);
    return (1.0 - w) * amp[i] + w * amp[i + 1];
}

AmplitudeSeries evolve_branch(const ModelParams& params, const PulseSpec& pulse, Branch branch,
                              const TimeGrid& grid) {
    params.validate();
    if (!(grid.t_max > 0.0) || !(grid.dt > 0.0))
        throw std::invalid_argument("evolve_branch: grid must have t_max > 0 and dt > 0");

    const double gamma = params.gamma;
    const double delta = branch_detuning(params, branch);
    const double rate = stiffness_rate(params, pulse, delta);
    if (grid.dt * rate > kPhaseGate) {
        std::ostringstream msg;
        msg << "evolve_branch: grid too coarse, phase advance per step " << grid.dt * rate
            << " rad exceeds " << kPhaseGate;
        throw std::invalid_argument(msg.str());
    }

    const double dt = align_dt(grid.dt, pulse, grid.t_max);
    const auto n_steps = static_cast<Eigen::Index>(std::ceil(grid.t_max / dt - 1e-9));

    AmplitudeSeries series;
    series.branch = branch;
    series.frame_shift = branch == Branch::A ? params.omega_L + params.delta_a0 : params.omega_L;
    series.detuning = delta;
    series.t = Eigen::ArrayXd::LinSpaced(n_steps + 1, 0.0, double(n_steps) * dt);
    series.amp = Eigen::ArrayXcd::Zero(n_steps + 1);

    const std::complex<double> c(-gamma, delta);  // -(gamma - i delta)
    const double root_gamma = std::sqrt(gamma);
    std::complex<double> amp = 0.0;
    double max_abs = 0.0;

    for (Eigen::Index i = 0; i < n_steps; ++i) {
        const double t0 = double(i) * dt;
        const std::complex<double> u0 = root_gamma * pulse.envelope(t0, Side::Right);
        const std::complex<double> um = root_gamma * pulse.envelope(t0 + 0.5 * dt);
        const std::complex<double> u1 = root_gamma * pulse.envelope(t0 + dt, Side::Left);

        const std::complex<double> k1 = c * amp - u0;
        const std::complex<double> k2 = c * (amp + 0.5 * dt * k1) - um;
        const std::complex<double> k3 = c * (amp + 0.5 * dt * k2) - um;
        const std::complex<double> k4 = c * (amp + dt * k3) - u1;
        amp += dt / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);

        series.amp[i + 1] = amp;
        max_abs = std::max(max_abs, std::abs(amp));
    }
    if (!std::isfinite(max_abs) || max_abs > 1.0 + 1e-9)
        throw std::runtime_error("evolve_branch: amplitude left the unit disk, integration failed");
    return series;
}

ProbabilityCurve accumulate_probability(const AmplitudeSeries& series, double gamma) {
    if (!(gamma > 0.0)) throw std::domain_error("accumulate_probability: gamma must be > 0");
    ProbabilityCurve out;
    const Eigen::ArrayXd f = gamma * series.amp.abs2();
    out.p = cumulative_trapezoid(f, series.dt());
    for (Eigen::Index i = 1; i < out.p.size(); ++i) {
        if (!std::isfinite(out.p[i]) || out.p[i] < out.p[i - 1])
            throw std::runtime_error("accumulate_probability: nonmonotone accumulation, integration error");
    }
    out.p_end = out.p.size() ? out.p[out.p.size() - 1] : 0.0;
    out.tail_mass = series.amp.size() ? 0.5 * std::norm(series.amp[series.amp.size() - 1]) : 0.0;
    out.p_infinity = out.p_end + out.tail_mass;
    return out;
}

FieldProfiles field_profiles(const AmplitudeSeries& series, const PulseSpec& pulse,
                             const ModelParams& params, double time, const Eigen::ArrayXd& z) {
    if (series.t.size() == 0 || time < 0.0 || time > series.t[series.t.size() - 1] + 1e-12)
        throw std::invalid_argument("field_profiles: time outside the evolved grid");
    using namespace std::complex_literals;
    const double root_gamma = std::sqrt(params.gamma);
    const double a_phase_rate = series.branch == Branch::A
                                    ? 2.0 * params.delta_a0 - params.coupling_J
                                    : params.delta_a0;
    FieldProfiles out;
    out.z = z;
    out.photon_b = Eigen::ArrayXcd::Zero(z.size());
    out.photon_a = Eigen::ArrayXcd::Zero(z.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) {
        const double tau = time - z[k];  // retarded time (c = 1)
        std::complex<double> b = pulse.envelope(tau);
        std::complex<double> a = 0.0;
        if (z[k] >= 0.0 && tau >= 0.0) {
            const std::complex<double> retarded = root_gamma * series.at(tau);
            b += retarded;
            a = retarded * std::exp(-1i * a_phase_rate * z[k]);
        }
        out.photon_b[k] = b;
        out.photon_a[k] = a;
    }
    return out;
}

Eigen::ArrayXd conservation_residual_series(const AmplitudeSeries& series, const PulseSpec& pulse,
                                            const ModelParams& params) {
    const double gamma = params.gamma;
    const double root_gamma = std::sqrt(gamma);
    const auto bounds = segment_bounds(series, pulse);
    const double dt = series.dt();
    const Eigen::Index n = series.t.size();

    auto h = [&](Eigen::Index i, Side side) {
        const std::complex<double> u = pulse.envelope(series.t[i], side);
        return 2.0 * gamma * std::norm(series.amp[i]) +
               2.0 * root_gamma * (std::conj(series.amp[i]) * u).real();
    };
    const Eigen::ArrayXd emitted_minus_decayed = cumulative_piecewise(h, n, dt, bounds);
    return (series.amp.abs2() + emitted_minus_decayed).abs();
}

double conservation_residual(const AmplitudeSeries& series, const PulseSpec& pulse,
                             const ModelParams& params, double time) {
    const Eigen::ArrayXd r = conservation_residual_series(series, pulse, params);
    const double dt = series.dt();
    auto i = static_cast<Eigen::Index>(std::llround(time / dt));
    i = std::max<Eigen::Index>(0, std::min<Eigen::Index>(i, r.size() - 1));
    return r[i];
}

WorkBreakdown work_breakdown(const AmplitudeSeries& series, const PulseSpec& pulse,
                             const ModelParams& params, bool* envelope_jumps) {
    if (series.branch != Branch::A)
        throw std::invalid_argument("work_breakdown: work is defined for the driven A branch");
    const double gamma = params.gamma;
    const double root_gamma = std::sqrt(gamma);
    const double dt = series.dt();
    const Eigen::Index n = series.t.size();
    const auto bounds = segment_bounds(series, pulse);
    const std::complex<double> c(-gamma, series.detuning);

    auto in_phase = [&](Eigen::Index i, Side side) {
        return (std::conj(series.amp[i]) * pulse.envelope(series.t[i], side)).real();
    };
    auto reactive = [&](Eigen::Index i, Side side) {
        return (std::conj(series.amp[i]) * pulse.envelope_derivative(series.t[i], side)).imag();
    };
    auto direct = [&](Eigen::Index i, Side side) {
        const std::complex<double> u = pulse.envelope(series.t[i], side);
        const std::complex<double> amp_dot = c * series.amp[i] - root_gamma * u;
        return (std::complex<double>(0.0, 1.0) * std::conj(amp_dot) * u).real();
    };

    const double s_abs = cumulative_piecewise(in_phase, n, dt, bounds)[n - 1];
    double s_reac = cumulative_piecewise(reactive, n, dt, bounds)[n - 1];
    const double s_direct = cumulative_piecewise(direct, n, dt, bounds)[n - 1];

    bool jumps_used = false;
    for (const auto& [tj, jump] : pulse.jumps()) {
        if (std::abs(jump) > 1e-12) jumps_used = true;
        if (tj <= 0.0 || tj >= series.t[n - 1]) continue;
        s_reac += (std::conj(series.at(tj)) * jump).imag();
    }
    if (envelope_jumps) *envelope_jumps = jumps_used;

    WorkBreakdown w;
    w.w_abs = -2.0 * params.omega_L * root_gamma * s_abs;
    w.w_reac = 2.0 * root_gamma * s_reac;
    w.w_in = w.w_abs + 2.0 * root_gamma * s_direct;
    return w;
}

double da_residual(const ModelParams& params, const PulseSpec& pulse) {
    return da_residual(params, pulse, auto_grid(params, pulse, Branch::A));
}

double da_residual(const ModelParams& params, const PulseSpec& pulse, const TimeGrid& grid) {
    const AmplitudeSeries series = evolve_branch(params, pulse, Branch::A, grid);
    const double final_abs = std::abs(series.amp[series.amp.size() - 1]);
    if (final_abs >= 1e-6) {
        std::ostringstream msg;
        msg << "da_residual: run not converged, |amp(t_max)| = " << final_abs
            << ", unaccumulated tail mass ~ " << 0.5 * final_abs * final_abs;
        throw std::runtime_error(msg.str());
    }
    const ProbabilityCurve p = accumulate_probability(series, params.gamma);

    const double dt = series.dt();
    const Eigen::Index n = series.t.size();
    const auto bounds = segment_bounds(series, pulse);
    auto in_phase = [&](Eigen::Index i, Side side) {
        return (std::conj(series.amp[i]) * pulse.envelope(series.t[i], side)).real();
    };
    // w_abs / (2 omega_L) = -sqrt(gamma) int Re[conj(amp) u]
    const double absorbed_fraction =
        -std::sqrt(params.gamma) * cumulative_piecewise(in_phase, n, dt, bounds)[n - 1];
    return std::abs(p.p_infinity - absorbed_fraction);
}

double convergence_error(const ModelParams& params, const PulseSpec& pulse, Branch branch,
                         const TimeGrid& grid) {
    const AmplitudeSeries coarse = evolve_branch(params, pulse, branch, grid);
    TimeGrid fine_grid{grid.t_max, 0.5 * coarse.dt()};
    const AmplitudeSeries fine = evolve_branch(params, pulse, branch, fine_grid);
    double err = 0.0;
    const Eigen::Index n = std::min(coarse.amp.size(), (fine.amp.size() + 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i)
        err = std::max(err, std::abs(coarse.amp[i] - fine.amp[2 * i]));
    return err;
}

}  // namespace lchain
