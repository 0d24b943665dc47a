#include "lchain/numerics.hpp"

namespace lchain {

namespace {

double si_series(double x) {
    // Si(x) = sum_k (-1)^k x^(2k+1) / ((2k+1)(2k+1)!)
    double term = x;
    double sum = x;
    const double x2 = x * x;
    for (int k = 0; k < 60; ++k) {
        const double a = 2.0 * k + 1.0;
        term *= -x2 * a / ((a + 2.0) * (a + 2.0) * (a + 1.0));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

double si_asymptotic(double x) {
    // Si(x) = pi/2 - f(x) cos x - g(x) sin x with
    //   f ~ (1/x) sum (-1)^k (2k)!   / x^(2k)
    //   g ~ (1/x^2) sum (-1)^k (2k+1)! / x^(2k)
    // truncated before the terms start growing.
    const double x2 = x * x;
    double f = 0.0, g = 0.0;
    double tf = 1.0;  // (2k)!/x^(2k)
    double tg = 1.0;  // (2k+1)!/x^(2k)
    double sign = 1.0;
    for (int k = 0; k < 30; ++k) {
        f += sign * tf;
        g += sign * tg;
        const double a = 2.0 * k;
        const double next_tf = tf * (a + 1.0) * (a + 2.0) / x2;
        const double next_tg = tg * (a + 2.0) * (a + 3.0) / x2;
        if (next_tf > tf) break;  // asymptotic series turned
        tf = next_tf;
        tg = next_tg;
        sign = -sign;
    }
    f /= x;
    g /= x2;
    return 0.5 * M_PI - f * std::cos(x) - g * std::sin(x);
}

}  // namespace

double sine_integral(double x) {
    if (std::isnan(x)) return x;
    const double ax = std::abs(x);
    double v;
    if (ax <= 25.0)
        v = si_series(ax);
    else if (std::isinf(ax))
        v = 0.5 * M_PI;
    else
        v = si_asymptotic(ax);
    return x < 0.0 ? -v : v;
}

Eigen::ArrayXd cumulative_trapezoid(const Eigen::ArrayXd& f, double dt) {
    Eigen::ArrayXd out(f.size());
    if (f.size() == 0) return out;
    out[0] = 0.0;
    for (Eigen::Index i = 1; i < f.size(); ++i)
        out[i] = out[i - 1] + 0.5 * dt * (f[i - 1] + f[i]);
    return out;
}

namespace {

// Cumulative Simpson within one smooth segment [i0, i1]; out[i0] is taken as
// the starting value. Odd nodes use the half-interval three-point rule.
void cumsimpson_segment(const Eigen::ArrayXd& f, double dt, Eigen::Index i0, Eigen::Index i1,
                        Eigen::ArrayXd& out) {
    const Eigen::Index n = i1 - i0;
    if (n <= 0) return;
    if (n == 1) {
        out[i0 + 1] = out[i0] + 0.5 * dt * (f[i0] + f[i0 + 1]);
        return;
    }
    for (Eigen::Index j = i0 + 1; j <= i1; ++j) {
        const Eigen::Index k = j - i0;
        if (k % 2 == 0) {
            out[j] = out[j - 2] + dt / 3.0 * (f[j - 2] + 4.0 * f[j - 1] + f[j]);
        } else if (j + 1 <= i1) {
            out[j] = out[j - 1] + dt / 12.0 * (5.0 * f[j - 1] + 8.0 * f[j] - f[j + 1]);
        } else {
            out[j] = out[j - 1] + dt / 12.0 * (-f[j - 2] + 8.0 * f[j - 1] + 5.0 * f[j]);
        }
    }
}

}  // namespace

Eigen::ArrayXd cumulative_simpson(const Eigen::ArrayXd& f, double dt,
                                  const std::vector<Eigen::Index>& segment_bounds) {
    Eigen::ArrayXd out(f.size());
    if (f.size() == 0) return out;
    out[0] = 0.0;
    if (segment_bounds.size() < 2) {
        cumsimpson_segment(f, dt, 0, f.size() - 1, out);
        return out;
    }
    for (std::size_t s = 0; s + 1 < segment_bounds.size(); ++s)
        cumsimpson_segment(f, dt, segment_bounds[s], segment_bounds[s + 1], out);
    return out;
}

Eigen::ArrayXd cumulative_simpson(const Eigen::ArrayXd& f, double dt) {
    return cumulative_simpson(f, dt, {Eigen::Index(0), f.size() - 1});
}

double integrate_simpson(const Eigen::ArrayXd& f, double dt,
                         const std::vector<Eigen::Index>& segment_bounds) {
    if (f.size() < 2) return 0.0;
    return cumulative_simpson(f, dt, segment_bounds)[f.size() - 1];
}

double integrate_simpson(const Eigen::ArrayXd& f, double dt) {
    return integrate_simpson(f, dt, {Eigen::Index(0), f.size() - 1});
}

}  // namespace lchain
