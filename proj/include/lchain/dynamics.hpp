// dynamics.hpp — time-domain integration of the reduced amplitude equations
//
// Both branches reduce, after the Wigner-Weisskopf elimination of the field
// and removal of the optical carrier, to one slowly varying complex amplitude
//
//     d amp/dt = -(gamma - i delta) amp - sqrt(gamma) u(t),   amp(0) = 0,
//
// where delta is delta_LbJ on the A branch (gene base "A", shifted line) and
// delta_Lb on the B branch (gene base "B", bare line), and u(t) is the unit-
// norm pulse envelope at the emitter. |amp| and every probability are frame
// independent; in particular nothing depends on delta_a0, which only shifts
// the recorded frame.

#pragma once

#include <Eigen/Core>
#include <complex>

#include "lchain/analytic.hpp"
#include "lchain/model.hpp"
#include "lchain/pulse.hpp"

namespace lchain {

enum class Branch { A, B };

inline double branch_detuning(const ModelParams& params, Branch branch) {
    const Detunings d = detunings(params);
    return branch == Branch::A ? d.delta_LbJ : d.delta_Lb;
}

struct TimeGrid {
    double t_max = 0.0;
    double dt = 0.0;
};

// Step small enough to keep the per-step phase advance well under the 0.1 rad
// rejection gate, horizon long enough for the pulse to pass and the emitter
// to ring down.
TimeGrid auto_grid(const ModelParams& params, const PulseSpec& pulse, Branch branch);

struct AmplitudeSeries {
    Branch branch = Branch::A;
    double frame_shift = 0.0;  // carrier frequency removed from the stored amplitude
    double detuning = 0.0;     // branch detuning used in the evolution
    Eigen::ArrayXd t;          // uniform grid, t[0] = 0
    Eigen::ArrayXcd amp;       // excited-state amplitude per node

    double dt() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }
    std::complex<double> at(double time) const;  // linear interpolation, 0 outside
};

// Fixed-step RK4 march of the reduced equation. The grid step is snapped so
// that envelope discontinuities land on nodes; stages at nodes use one-sided
// envelope values. Throws if the phase advance per step exceeds 0.1 rad.
AmplitudeSeries evolve_branch(const ModelParams& params, const PulseSpec& pulse, Branch branch,
                              const TimeGrid& grid);

struct ProbabilityCurve {
    Eigen::ArrayXd p;    // p(t) = gamma int_0^t |amp|^2, trapezoid accumulation
    double p_end = 0.0;
    double tail_mass = 0.0;    // free-decay extrapolation |amp(t_max)|^2 / 2
    double p_infinity = 0.0;   // p_end + tail_mass
};

// Monotone nondecreasing by construction for finite input; a nonmonotone or
// non-finite accumulation signals an integration failure and throws.
ProbabilityCurve accumulate_probability(const AmplitudeSeries& series, double gamma);

// Spatial envelopes at fixed time over a caller-supplied z grid (c = 1 units,
// z > 0 is the outgoing side). photon_b carries the interference of the
// freely propagated input with the emitted field; photon_a is pure emission.
// Both are scaled so that int |.|^2 dz gives probabilities directly; the
// optical carrier exp(i omega_L (z - t)) and the frame phase are removed.
// photon_a keeps its residual spatial phase (2 delta_a0 - J) z on the A
// branch and delta_a0 z on the B branch.
struct FieldProfiles {
    Eigen::ArrayXd z;
    Eigen::ArrayXcd photon_b;
    Eigen::ArrayXcd photon_a;
};

FieldProfiles field_profiles(const AmplitudeSeries& series, const PulseSpec& pulse,
                             const ModelParams& params, double time, const Eigen::ArrayXd& z);

// |1 - (input remainder + |amp|^2 + emitted)| via the real-space norms, which
// reduce exactly to time-domain quadratures of the amplitude identity. Zero
// for vacuum input; grows with integration error, so it doubles as a
// step-size diagnostic.
double conservation_residual(const AmplitudeSeries& series, const PulseSpec& pulse,
                             const ModelParams& params, double time);
Eigen::ArrayXd conservation_residual_series(const AmplitudeSeries& series, const PulseSpec& pulse,
                                            const ModelParams& params);

// Incoming work and its absorptive/reactive split for a driven A-branch run.
// w_abs integrates the in-phase quadrature of the drive against the
// amplitude; w_reac integrates the envelope derivative (one-sided at
// discontinuities, plus the jump boundary terms); w_in is computed through
// the independent route using the amplitude derivative, so
// w_in = w_abs + w_reac only up to quadrature error. `envelope_jumps`
// reports that one-sided derivatives were used.
WorkBreakdown work_breakdown(const AmplitudeSeries& series, const PulseSpec& pulse,
                             const ModelParams& params, bool* envelope_jumps = nullptr);

// Residual of the work-probability identity p(inf) = w_abs / (2 omega_L),
// computed in the omega_L-free form so it is defined for every omega_L.
// Requires the run to have rung down (|amp(t_max)| < 1e-6) and holds for
// every envelope family.
double da_residual(const ModelParams& params, const PulseSpec& pulse);
double da_residual(const ModelParams& params, const PulseSpec& pulse, const TimeGrid& grid);

// Step-halving self-check: max_t |amp_dt - amp_dt/2|.
double convergence_error(const ModelParams& params, const PulseSpec& pulse, Branch branch,
                         const TimeGrid& grid);

}  // namespace lchain
