// analytic.hpp — closed-form long-time probabilities, susceptibility and
// monochromatic work limits. These are the reference quantities every
// time-domain result is checked against.

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "lchain/model.hpp"
#include "lchain/numerics.hpp"

namespace lchain {

// Long-time probability that a single photon of linewidth `delta_pulse`
// flips the environment base, for detuning `detuning` between the pulse
// carrier and the (possibly shifted) transition.
//
// Evaluated in the combined form
//     P = gamma (gamma + delta_pulse/2) / ((gamma + delta_pulse/2)^2 + detuning^2),
// which is algebraically equal to the textbook prefactor-times-bracket
// expression wherever the latter is defined and stays finite at its removable
// singularity (delta_pulse = 2 gamma, detuning = 0), where P = 1/2.
inline double transition_probability(double delta_pulse, double detuning, double gamma) {
    if (std::isnan(delta_pulse) || delta_pulse < 0.0)
        throw std::domain_error("transition_probability: pulse linewidth must be >= 0");
    if (std::isnan(gamma) || gamma <= 0.0)
        throw std::domain_error("transition_probability: gamma must be > 0");
    if (std::isinf(detuning) || std::isinf(delta_pulse)) return 0.0;
    const double s = gamma + 0.5 * delta_pulse;
    const double p = gamma * s / (s * s + detuning * detuning);
    return std::min(1.0, std::max(0.0, p));
}

struct BranchProbabilities {
    double p_rep;   // A base: environment base flipped b -> a
    double p_fail;  // A base: photon left in the b modes
    double p_dorm;  // B base: environment base kept in b
    double p_mut;   // B base: off-resonant flip b -> a
};

// p_rep uses the shifted detuning delta_LbJ, p_mut the bare detuning delta_Lb;
// complements pair up exactly.
inline BranchProbabilities branch_probabilities(const ModelParams& params, double delta_pulse) {
    params.validate();
    const Detunings d = detunings(params);
    BranchProbabilities out{};
    out.p_rep = transition_probability(delta_pulse, d.delta_LbJ, params.gamma);
    out.p_fail = 1.0 - out.p_rep;
    out.p_mut = transition_probability(delta_pulse, d.delta_Lb, params.gamma);
    out.p_dorm = 1.0 - out.p_mut;
    return out;
}

// Linear-response susceptibility chi = i gamma / (gamma - i delta) of the
// excited amplitude to a monochromatic drive. chi'' is absorptive, chi'
// reactive.
struct Susceptibility {
    std::complex<double> chi;
    double chi_re;  // chi'  = -gamma delta / (gamma^2 + delta^2)
    double chi_im;  // chi'' =  gamma^2     / (gamma^2 + delta^2), in (0, 1]
};

inline Susceptibility susceptibility(double detuning, double gamma) {
    if (std::isnan(gamma) || gamma <= 0.0)
        throw std::domain_error("susceptibility: gamma must be > 0");
    if (std::isinf(detuning)) return Susceptibility{{0.0, 0.0}, 0.0, 0.0};
    const double den = gamma * gamma + detuning * detuning;
    const double re = -gamma * detuning / den;
    const double im = gamma * gamma / den;
    return Susceptibility{{re, im}, re, im};
}

// Energy ledger of a driven branch (units of hbar gamma when frequencies are).
struct WorkBreakdown {
    double w_in = 0.0;    // total incoming work
    double w_abs = 0.0;   // absorptive part
    double w_reac = 0.0;  // reactive (dispersive) part
};

// Monochromatic (delta_pulse << gamma) limits: w_abs -> 2 omega_L chi'',
// w_reac -> delta_pulse chi', both at the shifted detuning delta_LbJ.
// `narrowband` reports whether the regime assumption delta_pulse <= gamma/10
// actually holds.
inline WorkBreakdown monochromatic_work(const ModelParams& params, double delta_pulse,
                                        bool* narrowband = nullptr) {
    params.validate();
    if (std::isnan(delta_pulse) || delta_pulse < 0.0)
        throw std::domain_error("monochromatic_work: pulse linewidth must be >= 0");
    if (narrowband) *narrowband = delta_pulse <= 0.1 * params.gamma;
    const Susceptibility chi = susceptibility(detunings(params).delta_LbJ, params.gamma);
    WorkBreakdown w;
    w.w_abs = 2.0 * params.omega_L * chi.chi_im;
    w.w_reac = delta_pulse * chi.chi_re;
    w.w_in = w.w_abs + w.w_reac;
    return w;
}

// Work absorbed by a classical damped oscillator driven by the same
// slowly-decaying force: W = delta_pulse chi' + 2 omega_L chi''. Cross-check
// for the quantum asymptotics above.
inline double classical_oscillator_work(double delta_pulse, double omega_L,
                                        const Susceptibility& chi) {
    if (std::isnan(delta_pulse) || delta_pulse < 0.0)
        throw std::domain_error("classical_oscillator_work: pulse linewidth must be >= 0");
    return delta_pulse * chi.chi_re + 2.0 * omega_L * chi.chi_im;
}

// Closed-form excited amplitude for an exponential pulse, in the rotating
// frame where the carrier is removed (same frame as the numeric evolution):
//     amp(t) = -sqrt(gamma Delta) (e^{-Delta t/2} - e^{-(gamma - i delta) t})
//              / (gamma - i delta - Delta/2),
// with the confluent limit taken when the denominator vanishes.
inline std::complex<double> exponential_amplitude_closed_form(double delta_pulse, double detuning,
                                                              double gamma, double t) {
    if (t <= 0.0) return 0.0;
    const std::complex<double> b(gamma, -detuning);                   // gamma - i delta
    const std::complex<double> d = b - 0.5 * delta_pulse;             // denominator; 0 at the confluence
    const double amp = std::sqrt(gamma * delta_pulse);
    if (std::abs(d) * t < 1e-3) {
        // confluent regime: (e^{-at} - e^{-bt})/d = t e^{-bt} (e^{dt} - 1)/(dt)
        const std::complex<double> z = d * t;
        const std::complex<double> em1_over_z =
            1.0 + z / 2.0 * (1.0 + z / 3.0 * (1.0 + z / 4.0 * (1.0 + z / 5.0)));
        return -amp * t * std::exp(-b * t) * em1_over_z;
    }
    const std::complex<double> slow = std::exp(std::complex<double>(-0.5 * delta_pulse * t, 0.0));
    const std::complex<double> fast = std::exp(-b * t);
    return -amp * (slow - fast) / d;
}

}  // namespace lchain
