// mode_oracle.hpp — brute-force integration of the full mode-resolved
// Schrodinger equations on a discretized frequency comb. No Wigner-Weisskopf
// reduction: this is the independent check of the reduced dynamics.

#pragma once

#include <Eigen/Core>
#include <complex>
#include <utility>
#include <vector>

#include "lchain/dynamics.hpp"
#include "lchain/model.hpp"
#include "lchain/pulse.hpp"

namespace lchain {

// Equally spaced comb of M modes centered on omega_L, identical for the two
// photon families. gamma = 2 pi g^2 rho holds exactly by construction.
struct ModeGrid {
    double gamma = 0.0;
    double omega_L = 0.0;
    double halfwidth = 0.0;  // comb covers omega_L +- halfwidth
    int modes = 0;           // M, odd so one mode sits exactly on omega_L
    double domega = 0.0;     // 2 halfwidth / M
    double rho = 0.0;        // mode density, 1/domega
    double g = 0.0;          // per-mode coupling, sqrt(gamma domega / 2 pi)
    Eigen::ArrayXd omega;    // the M mode frequencies
};

ModeGrid build_mode_grid(double gamma, double omega_L, double halfwidth, int modes);
// Same, additionally rejecting combs too narrow for the pulse spectrum.
ModeGrid build_mode_grid(double gamma, double omega_L, double halfwidth, int modes,
                         const PulseSpec& pulse);

// All amplitudes of the single-excitation sector, in the rotating frame with
// the carrier omega_L removed from every state.
struct FullState {
    Eigen::ArrayXcd photon_b;        // photon in a b mode (F_omega / D_omega)
    std::complex<double> excited{};  // emitter excited, field in vacuum (R_e / M_e)
    Eigen::ArrayXcd photon_a;        // photon in an a mode (R_a omega / M_a omega)

    double norm_sq() const {
        return photon_b.abs2().sum() + std::norm(excited) + photon_a.abs2().sum();
    }
};

// Initial sector state for a given pulse: photon fully in the b modes.
// Bin-integrated spectral masses (exact total of 1, residual tail mass
// assigned to the edge bins) for the analytic envelope families; pointwise
// sampling renormalized on the grid for sampled envelopes.
FullState initial_state(const ModeGrid& grid, const PulseSpec& pulse);

struct OracleObservables {
    double p_flip = 0.0;      // sum |photon_a|^2: p_rep (A branch) or p_mut (B branch)
    double p_keep = 0.0;      // sum |photon_b|^2: p_fail (A) or p_dorm contribution (B)
    double excited_pop = 0.0; // |excited|^2, the transient
    double norm = 0.0;        // total squared norm, 1 under exact evolution
};

OracleObservables oracle_observables(const FullState& state);

struct OracleTrajectory {
    Branch branch = Branch::A;
    Eigen::ArrayXd t;           // recorded times
    Eigen::ArrayXd p_flip, p_keep, excited_pop, norm;
    Eigen::ArrayXcd excited;    // excited amplitude at the recorded times
    FullState final_state;
    double max_norm_drift = 0.0;
};

// RK4 march of the exact coupled linear equations. Rejects steps with phase
// advance above 0.1 rad in the rotating frame; norm drift beyond 1e-6 is a
// step-size failure and throws.
OracleTrajectory integrate_full(const ModeGrid& grid, const ModelParams& params,
                                const PulseSpec& pulse, Branch branch, double dt, double t_max,
                                int record_stride = 0);
// Same, but from a caller-prepared initial sector state.
OracleTrajectory integrate_full_from(const ModeGrid& grid, const ModelParams& params,
                                     FullState state, Branch branch, double dt, double t_max,
                                     int record_stride = 0);

// Deviation of the full-mode solution from the reduced dynamics across a
// sweep of comb resolutions. `converging` marks rows that improved on the
// previous row (first row is trivially true); a non-improving row flags a
// non-convergent configuration.
struct DiscrepancyRow {
    int modes = 0;
    double halfwidth = 0.0;
    double max_amp_dev = 0.0;  // max_t | |amp_oracle| - |amp_reduced| |
    double p_end_dev = 0.0;    // |p_flip(t_max) - p_reduced(t_max)|
    double norm_drift = 0.0;
    bool converging = true;
};

std::vector<DiscrepancyRow> ww_discrepancy(const ModelParams& params, const PulseSpec& pulse,
                                           Branch branch,
                                           const std::vector<std::pair<int, double>>& resolutions,
                                           double dt, double t_max);

}  // namespace lchain
