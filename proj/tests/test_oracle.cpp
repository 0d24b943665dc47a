#include <doctest.h>

#include <cmath>
#include <complex>

#include "lchain/mode_oracle.hpp"

using namespace lchain;

namespace {

ModelParams resonant_params(double coupling_J = 0.0) {
    // omega_L = omega_b0 = 50 so both detunings vanish at J = 0
    ModelParams p;
    p.omega_L = 50.0;
    p.omega_b0 = 50.0;
    p.coupling_J = coupling_J;
    return p;
}

}  // namespace

TEST_CASE("mode grid construction and validation") {
    const ModeGrid grid = build_mode_grid(1.0, 50.0, 20.0, 4001);
    CHECK(grid.rho == doctest::Approx(4001.0 / 40.0).epsilon(1e-15));
    CHECK(grid.g == doctest::Approx(std::sqrt(1.0 / (2.0 * M_PI * grid.rho))).epsilon(1e-15));
    CHECK(2.0 * M_PI * grid.g * grid.g * grid.rho == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(grid.omega[(grid.modes - 1) / 2] == doctest::Approx(50.0).epsilon(1e-15));
    CHECK(grid.omega.size() == 4001);

    // doubling the mode count at fixed bandwidth leaves gamma invariant
    const ModeGrid denser = build_mode_grid(1.0, 50.0, 20.0, 8003);
    CHECK(2.0 * M_PI * denser.g * denser.g * denser.rho == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(build_mode_grid(1.0, 50.0, 20.0, 400), std::invalid_argument);   // too few
    CHECK_THROWS_AS(build_mode_grid(1.0, 50.0, 20.0, 1000), std::invalid_argument);  // even
    CHECK_THROWS_AS(build_mode_grid(1.0, 50.0, 8.0, 1001), std::invalid_argument);   // narrow
    CHECK_THROWS_AS(build_mode_grid(1.0, 50.0, 12.0, 1001, PulseSpec::exponential(4.0)),
                    std::invalid_argument);  // pulse spectrum near the comb edge
}

TEST_CASE("initial state carries exactly one photon in the b modes") {
    const ModeGrid grid = build_mode_grid(1.0, 50.0, 10.0, 801);
    for (const PulseSpec& pulse : {PulseSpec::exponential(0.4), PulseSpec::gaussian(1.5),
                                   PulseSpec::rectangular(2.0)}) {
        const FullState s = initial_state(grid, pulse);
        CHECK(s.photon_b.abs2().sum() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(s.photon_a.abs2().sum() == 0.0);
        CHECK(std::abs(s.excited) == 0.0);

        const OracleObservables o = oracle_observables(s);
        CHECK(o.p_flip == 0.0);
        CHECK(o.p_keep == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(o.excited_pop == 0.0);
        CHECK(o.norm == doctest::Approx(1.0).epsilon(1e-12));
    }
    // sampled envelopes fall back to pointwise sampling, renormalized
    Eigen::ArrayXcd values(2000);
    for (int i = 0; i < 2000; ++i) values[i] = std::sqrt(0.5) * std::exp(-0.25 * 0.01 * i);
    double norm = 0.0;
    for (int i = 0; i + 1 < 2000; ++i)
        norm += 0.5 * 0.01 * (std::norm(values[i]) + std::norm(values[i + 1]));
    const PulseSpec sampled = PulseSpec::sampled(0.0, 0.01, values / std::sqrt(norm));
    CHECK(initial_state(grid, sampled).norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("unitarity at reference resolution") {
    const ModelParams p = resonant_params();
    const PulseSpec pulse = PulseSpec::exponential(0.4);
    const ModeGrid grid = build_mode_grid(p.gamma, p.omega_L, 10.0, 801, pulse);
    const OracleTrajectory traj = integrate_full(grid, p, pulse, Branch::A, 1e-3, 20.0);
    CHECK(traj.max_norm_drift < 1e-8);
    // component sum equals the norm at every recorded time
    for (Eigen::Index i = 0; i < traj.t.size(); ++i)
        CHECK(traj.p_flip[i] + traj.p_keep[i] + traj.excited_pop[i] ==
              doctest::Approx(traj.norm[i]).epsilon(1e-14));
}

TEST_CASE("decoupled comb freezes all amplitudes") {
    const ModelParams p = resonant_params();
    const PulseSpec pulse = PulseSpec::exponential(0.4);
    ModeGrid grid = build_mode_grid(p.gamma, p.omega_L, 10.0, 801, pulse);
    grid.g = 0.0;  // switch the dipole coupling off
    const FullState before = initial_state(grid, pulse);
    const OracleTrajectory traj = integrate_full(grid, p, pulse, Branch::A, 2e-3, 5.0);
    CHECK(std::abs(traj.final_state.excited) == 0.0);
    CHECK(traj.final_state.photon_a.abs2().sum() == 0.0);
    // free field evolution only changes phases
    for (int j : {0, 100, 400, 800})
        CHECK(std::abs(traj.final_state.photon_b[j]) ==
              doctest::Approx(std::abs(before.photon_b[j])).epsilon(1e-9));
}

TEST_CASE("a global phase on the photon changes no observable") {
    const ModelParams p = resonant_params();
    const PulseSpec pulse = PulseSpec::exponential(0.5);
    const ModeGrid grid = build_mode_grid(p.gamma, p.omega_L, 10.0, 601, pulse);
    FullState rotated = initial_state(grid, pulse);
    rotated.photon_b *= std::exp(std::complex<double>(0.0, 1.234));
    const OracleTrajectory a = integrate_full(grid, p, pulse, Branch::A, 2e-3, 10.0);
    const OracleTrajectory b = integrate_full_from(grid, p, rotated, Branch::A, 2e-3, 10.0);
    for (Eigen::Index i = 0; i < a.t.size(); ++i) {
        CHECK(a.p_flip[i] == doctest::Approx(b.p_flip[i]).epsilon(1e-13));
        CHECK(a.excited_pop[i] == doctest::Approx(b.excited_pop[i]).epsilon(1e-13));
    }
}

TEST_CASE("vacuum sector stays empty") {
    const ModelParams p = resonant_params();
    const ModeGrid grid = build_mode_grid(p.gamma, p.omega_L, 10.0, 601);
    const OracleTrajectory traj = integrate_full(grid, p, PulseSpec::vacuum(), Branch::B, 2e-3, 5.0);
    CHECK(traj.norm.maxCoeff() == 0.0);
}

TEST_CASE("full-mode solution tracks the reduced dynamics") {
    const ModelParams p = resonant_params();
    const PulseSpec pulse = PulseSpec::exponential(0.4);
    const ModeGrid grid = build_mode_grid(p.gamma, p.omega_L, 10.0, 801, pulse);
    const double dt = 2e-3, t_max = 30.0;
    const OracleTrajectory traj = integrate_full(grid, p, pulse, Branch::A, dt, t_max);
    const AmplitudeSeries reduced = evolve_branch(p, pulse, Branch::A, TimeGrid{t_max, dt});
    const ProbabilityCurve curve = accumulate_probability(reduced, p.gamma);

    double amp_scale = 0.0, amp_dev = 0.0, settled_dev = 0.0, p_dev = 0.0;
    for (Eigen::Index i = 0; i < traj.t.size(); ++i) {
        const double ref = std::abs(reduced.at(traj.t[i]));
        const double dev = std::abs(std::abs(traj.excited[i]) - ref);
        amp_scale = std::max(amp_scale, ref);
        amp_dev = std::max(amp_dev, dev);
        if (traj.t[i] >= 1.0) settled_dev = std::max(settled_dev, dev);
        const auto k = static_cast<Eigen::Index>(std::llround(traj.t[i] / dt));
        p_dev = std::max(p_dev, std::abs(traj.p_flip[i] - curve.p[k]));
    }
    // The comb is band limited, so the discontinuous pulse front rings for a
    // short onset window (shrinks with halfwidth, independent of mode count).
    CHECK(amp_dev < 0.055 * amp_scale);
    CHECK(settled_dev < 0.025 * amp_scale);
    CHECK(p_dev < 0.01);
}

TEST_CASE("removable singularity from the full-mode route") {
    const ModelParams p = resonant_params();
    const PulseSpec pulse = PulseSpec::exponential(2.0);
    const ModeGrid grid = build_mode_grid(p.gamma, p.omega_L, 10.0, 801, pulse);
    const OracleTrajectory traj = integrate_full(grid, p, pulse, Branch::A, 2e-3, 26.0);
    CHECK(traj.p_flip[traj.p_flip.size() - 1] == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("probabilities are independent of delta_a0 in the full model") {
    // delta_a0 shifts the a-photon emission line; on a flat comb the long-time
    // probability must not move
    ModelParams p0 = resonant_params();
    ModelParams p1 = resonant_params();
    p1.delta_a0 = 0.5;
    const PulseSpec pulse = PulseSpec::exponential(0.5);
    const ModeGrid grid = build_mode_grid(1.0, 50.0, 10.0, 801, pulse);
    const OracleTrajectory t0 = integrate_full(grid, p0, pulse, Branch::A, 2e-3, 25.0);
    const OracleTrajectory t1 = integrate_full(grid, p1, pulse, Branch::A, 2e-3, 25.0);
    CHECK(t0.p_flip[t0.p_flip.size() - 1] ==
          doctest::Approx(t1.p_flip[t1.p_flip.size() - 1]).epsilon(5e-3));
}

TEST_CASE("mutation branch detunings reach the closed form") {
    // B branch with a detuned bare line inside the comb
    ModelParams p;
    p.omega_L = 50.0;
    p.omega_b0 = 45.0;  // delta_Lb = 5
    p.coupling_J = 5.0;
    const PulseSpec pulse = PulseSpec::exponential(1.0);
    const ModeGrid grid = build_mode_grid(p.gamma, p.omega_L, 20.0, 1601, pulse);
    const OracleTrajectory traj = integrate_full(grid, p, pulse, Branch::B, 1e-3, 30.0);
    const double expected = transition_probability(1.0, 5.0, 1.0);
    CHECK(traj.p_flip[traj.p_flip.size() - 1] == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("discrepancy table shrinks with resolution") {
    const ModelParams p = resonant_params();
    const PulseSpec pulse = PulseSpec::exponential(2.0);
    const auto table = ww_discrepancy(p, pulse, Branch::A,
                                      {{401, 10.0}, {801, 10.0}, {1601, 20.0}}, 2e-3, 15.0);
    REQUIRE(table.size() == 3);
    CHECK(table[0].max_amp_dev > table[2].max_amp_dev);
    CHECK(table[2].converging);
    for (const auto& row : table) CHECK(row.norm_drift < 1e-6);

    CHECK_THROWS_AS(ww_discrepancy(p, pulse, Branch::A, {{401, 10.0}}, 2e-3, 10.0),
                    std::invalid_argument);
}

TEST_CASE("step-size gates") {
    const ModelParams p = resonant_params();
    const PulseSpec pulse = PulseSpec::exponential(0.5);
    const ModeGrid grid = build_mode_grid(p.gamma, p.omega_L, 10.0, 601, pulse);
    CHECK_THROWS_AS(integrate_full(grid, p, pulse, Branch::A, 0.05, 5.0),
                    std::invalid_argument);  // 0.05 * 10 = 0.5 rad
    ModelParams other = p;
    other.gamma = 2.0;
    CHECK_THROWS_AS(integrate_full(grid, other, pulse, Branch::A, 1e-3, 5.0),
                    std::invalid_argument);  // grid built for gamma = 1
}
