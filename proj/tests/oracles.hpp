// oracles.hpp — test-side reference implementations, kept independent of the
// library code paths they check.

#pragma once

#include <cmath>
#include <complex>
#include <functional>

namespace test_oracles {

// Literal prefactor-times-bracket form of the long-time flip probability.
// Undefined at its removable singularity (delta_pulse = 2 gamma, detuning = 0);
// the library's combined form is checked against this away from it.
inline double flip_probability_reference(double delta_pulse, double detuning, double gamma) {
    const double half_minus = 0.5 * (2.0 * gamma - delta_pulse);
    const double half_plus = 0.5 * (2.0 * gamma + delta_pulse);
    const double prefactor = gamma * gamma / (half_minus * half_minus + detuning * detuning);
    const double bracket = 1.0 + delta_pulse / (2.0 * gamma) -
                           delta_pulse * (2.0 * gamma + delta_pulse) /
                               (half_plus * half_plus + detuning * detuning);
    return prefactor * bracket;
}

// Composite-Simpson quadrature on [a, b] with n subintervals (n made even).
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + h * i) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace test_oracles
