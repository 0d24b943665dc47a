#include <doctest.h>

#include <cmath>
#include <random>

#include "lchain/analytic.hpp"
#include "oracles.hpp"

using namespace lchain;
using test_oracles::flip_probability_reference;

TEST_CASE("flip probability: pinned values") {
    // perfect replication limit
    CHECK(transition_probability(0.0, 0.0, 1.0) == 1.0);
    // Delta = 0 reduces to the Lorentzian line
    CHECK(transition_probability(0.0, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
    // removable singularity: finite two-sided limit, approached from both sides
    CHECK(transition_probability(2.0, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(transition_probability(2.0 * (1.0 + 1e-6), 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(transition_probability(2.0 * (1.0 - 1e-6), 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-5));
    // the literal form agrees near (not at) the singularity, where it is still well conditioned
    CHECK(flip_probability_reference(2.0 * 1.005, 0.0, 1.0) == doctest::Approx(0.5).epsilon(5e-3));
    CHECK(flip_probability_reference(2.0 * 0.995, 0.0, 1.0) == doctest::Approx(0.5).epsilon(5e-3));
    // direct arithmetic on the closed form
    CHECK(transition_probability(0.1, 0.0, 1.0) == doctest::Approx(0.9523809523809523).epsilon(1e-12));
    CHECK(transition_probability(0.5, 0.0, 1.0) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(transition_probability(1.0, 0.0, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(transition_probability(4.0, 0.0, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(transition_probability(0.1, 10.0, 1.0) == doctest::Approx(0.0103855101).epsilon(1e-6));
}

TEST_CASE("flip probability: domain errors") {
    CHECK_THROWS_AS(transition_probability(-0.1, 0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(transition_probability(0.1, 0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(transition_probability(0.1, 0.0, -2.0), std::domain_error);
    CHECK_THROWS_AS(transition_probability(std::nan(""), 0.0, 1.0), std::domain_error);
}

TEST_CASE("combined form equals the literal two-factor form away from the singularity") {
    std::mt19937 gen(23);
    std::uniform_real_distribution<double> d_delta(0.0, 10.0);
    std::uniform_real_distribution<double> d_det(-100.0, 100.0);
    std::uniform_real_distribution<double> d_gamma(0.2, 5.0);
    for (int k = 0; k < 5000; ++k) {
        const double delta = d_delta(gen), det = d_det(gen), gamma = d_gamma(gen);
        // keep clear of the singularity, where the literal form loses digits
        if (std::abs(delta - 2.0 * gamma) < 0.02 * gamma && std::abs(det) < 0.02 * gamma) continue;
        const double combined = transition_probability(delta, det, gamma);
        const double literal = flip_probability_reference(delta, det, gamma);
        CHECK(combined == doctest::Approx(literal).epsilon(1e-9));
    }
}

TEST_CASE("flip probability stays in [0,1], is even and unimodal in detuning") {
    std::mt19937 gen(29);
    std::uniform_real_distribution<double> d_delta(0.0, 10.0);
    std::uniform_real_distribution<double> d_det(-100.0, 100.0);
    for (int k = 0; k < 5000; ++k) {
        const double delta = d_delta(gen), det = d_det(gen);
        const double p = transition_probability(delta, det, 1.0);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        CHECK(p == transition_probability(delta, -det, 1.0));
    }
    // strictly decreasing in |detuning| for fixed Delta < 2 gamma
    for (double delta : {0.0, 0.3, 1.0, 1.9}) {
        double prev = transition_probability(delta, 0.0, 1.0);
        for (double det = 0.25; det <= 30.0; det += 0.25) {
            const double p = transition_probability(delta, det, 1.0);
            CHECK(p < prev);
            prev = p;
        }
    }
}

TEST_CASE("monochromatic limit of the flip probability is the absorptive susceptibility") {
    for (double det : {0.0, 0.1, 1.0, 5.0, 50.0, -3.0}) {
        const double p0 = transition_probability(0.0, det, 1.3);
        const double chi2 = susceptibility(det, 1.3).chi_im;
        CHECK(p0 == doctest::Approx(chi2).epsilon(1e-12));
    }
}

TEST_CASE("continuity across the removable singularity") {
    for (double eps : {1e-4, 1e-5, 1e-6, 1e-8}) {
        CHECK(std::abs(transition_probability(2.0 + eps, 0.0, 1.0) - 0.5) < 0.25 * eps);
        CHECK(std::abs(transition_probability(2.0 - eps, 0.0, 1.0) - 0.5) < 0.25 * eps);
    }
}

TEST_CASE("branch probabilities pair up and use the right detunings") {
    ModelParams p;
    p.omega_L = 10.0;
    p.omega_b0 = 0.0;
    p.coupling_J = 10.0;  // enzyme-tuned: shifted line resonant

    const BranchProbabilities bp = branch_probabilities(p, 0.1);
    CHECK(bp.p_rep == doctest::Approx(0.9523809524).epsilon(1e-9));
    CHECK(bp.p_mut == doctest::Approx(0.0103855101).epsilon(1e-6));
    CHECK(bp.p_rep + bp.p_fail == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(bp.p_dorm + bp.p_mut == doctest::Approx(1.0).epsilon(1e-15));

    SUBCASE("zero coupling merges the branches") {
        p.coupling_J = 0.0;
        const BranchProbabilities b0 = branch_probabilities(p, 0.37);
        CHECK(b0.p_rep == b0.p_mut);
    }
    SUBCASE("decoupled far-detuned limit is predominantly dormant") {
        p.coupling_J = 0.0;
        p.omega_L = 50.0;
        const BranchProbabilities b = branch_probabilities(p, 0.1);
        CHECK(b.p_rep < 5e-4);
        CHECK(b.p_dorm > 0.999);
    }
}

TEST_CASE("susceptibility values and structure") {
    const Susceptibility at_res = susceptibility(0.0, 1.0);
    CHECK(at_res.chi_re == 0.0);
    CHECK(at_res.chi_im == 1.0);
    CHECK(at_res.chi == std::complex<double>(0.0, 1.0));

    const Susceptibility at_gamma = susceptibility(1.0, 1.0);
    CHECK(at_gamma.chi_re == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(at_gamma.chi_im == doctest::Approx(0.5).epsilon(1e-15));

    CHECK(std::abs(susceptibility(1e12, 1.0).chi) < 2e-12);
    CHECK(std::abs(susceptibility(std::numeric_limits<double>::infinity(), 1.0).chi) == 0.0);
    CHECK_THROWS_AS(susceptibility(0.0, 0.0), std::domain_error);

    // chi traces the circle |chi - i/2| = 1/2
    std::mt19937 gen(31);
    std::uniform_real_distribution<double> d_det(-50.0, 50.0);
    for (int k = 0; k < 1000; ++k) {
        const Susceptibility s = susceptibility(d_det(gen), 2.1);
        const double r2 = s.chi_re * s.chi_re + (s.chi_im - 0.5) * (s.chi_im - 0.5);
        CHECK(r2 == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(s.chi_im > 0.0);
        CHECK(s.chi_im <= 1.0);
    }
}

TEST_CASE("monochromatic work limits") {
    ModelParams p;
    p.omega_L = 10.0;
    p.omega_b0 = 0.0;
    p.coupling_J = 10.0;  // shifted detuning 0

    bool narrowband = false;
    WorkBreakdown w = monochromatic_work(p, 1e-3, &narrowband);
    CHECK(narrowband);
    CHECK(w.w_abs == doctest::Approx(2.0 * p.omega_L).epsilon(1e-12));
    CHECK(w.w_reac == 0.0);

    p.coupling_J = 9.0;  // shifted detuning gamma
    w = monochromatic_work(p, 0.01, &narrowband);
    CHECK(narrowband);
    CHECK(w.w_abs == doctest::Approx(p.omega_L).epsilon(1e-12));
    CHECK(w.w_reac == doctest::Approx(-0.005).epsilon(1e-12));
    CHECK(w.w_in == doctest::Approx(w.w_abs + w.w_reac).epsilon(1e-15));

    // reactive part vanishes in the monochromatic limit
    CHECK(std::abs(monochromatic_work(p, 1e-9).w_reac) < 1e-9);

    monochromatic_work(p, 0.5, &narrowband);
    CHECK_FALSE(narrowband);
}

TEST_CASE("classical oscillator work cross-check") {
    const Susceptibility res = susceptibility(0.0, 1.0);
    CHECK(classical_oscillator_work(0.01, 10.0, res) == doctest::Approx(20.0).epsilon(1e-12));

    ModelParams p;
    p.omega_L = 7.0;
    p.omega_b0 = 0.0;
    p.coupling_J = -2.5;  // shifted detuning 9.5
    const Susceptibility chi = susceptibility(detunings(p).delta_LbJ, p.gamma);
    const WorkBreakdown quantum = monochromatic_work(p, 0.02);
    CHECK(classical_oscillator_work(0.02, p.omega_L, chi) ==
          doctest::Approx(quantum.w_in).epsilon(1e-13));

    CHECK(std::abs(classical_oscillator_work(0.01, 10.0, susceptibility(1e10, 1.0))) < 1e-8);
}

TEST_CASE("closed-form exponential amplitude: structure") {
    // at t = 0 the emitter is unexcited; far away it has rung down
    CHECK(exponential_amplitude_closed_form(0.5, 0.0, 1.0, 0.0) == std::complex<double>(0.0));
    CHECK(std::abs(exponential_amplitude_closed_form(0.5, 0.0, 1.0, 80.0)) < 1e-8);
    // confluent point stays finite and continuous
    const auto at_confluence = exponential_amplitude_closed_form(2.0, 0.0, 1.0, 1.0);
    const auto near_confluence = exponential_amplitude_closed_form(2.0 + 1e-9, 0.0, 1.0, 1.0);
    CHECK(std::abs(at_confluence - near_confluence) < 1e-8);
    CHECK(std::abs(at_confluence) > 0.1);
}
