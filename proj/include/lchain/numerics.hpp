// numerics.hpp — small shared numerical kernels (quadrature, special functions)

#pragma once

#include <Eigen/Core>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace lchain {

// Sine integral Si(x) = int_0^x sin(u)/u du.
// Power series for |x| <= 25, optimally truncated asymptotic expansion beyond.
double sine_integral(double x);

// exp(z) - 1 for complex z, accurate for small |z|.
inline std::complex<double> expm1_c(std::complex<double> z) {
    if (std::abs(z) > 1e-3) return std::exp(z) - 1.0;
    // fifth-order series; remainder ~ |z|^6/720 < 1e-21 on this branch
    return z * (1.0 + z / 2.0 * (1.0 + z / 3.0 * (1.0 + z / 4.0 * (1.0 + z / 5.0))));
}

// Cumulative trapezoid of samples f on a uniform grid with spacing dt.
// out[0] = 0. Increments are nonnegative whenever f is.
Eigen::ArrayXd cumulative_trapezoid(const Eigen::ArrayXd& f, double dt);

// Cumulative Simpson-type quadrature on a uniform grid, piecewise over smooth
// segments whose boundaries are given as node indices (always includes the two
// ends). Fourth-order accurate inside each segment.
Eigen::ArrayXd cumulative_simpson(const Eigen::ArrayXd& f, double dt,
                                  const std::vector<Eigen::Index>& segment_bounds);

// Convenience: single smooth segment over the whole grid.
Eigen::ArrayXd cumulative_simpson(const Eigen::ArrayXd& f, double dt);

// Definite integral via the same piecewise Simpson rule.
double integrate_simpson(const Eigen::ArrayXd& f, double dt,
                         const std::vector<Eigen::Index>& segment_bounds);
double integrate_simpson(const Eigen::ArrayXd& f, double dt);

}  // namespace lchain
