// pulse.hpp — single-photon wavepacket envelopes and the drive they exert
//
// A pulse is represented by its temporal envelope u(t) at the emitter position
// (the wavepacket front reaches the emitter at t = 0, so u(t < 0) = 0) with the
// single-photon normalization  int |u(t)|^2 dt = 1.  The spatial profile at
// t = 0 is u(-z/c) e^{i omega_L z / c}; in the continuum the mode density rho
// only ever enters reduced quantities through gamma = 2 pi g^2 rho, so the
// drive seen by the emitter is sqrt(gamma) u(t) e^{-i omega_L t}.

#pragma once

#include <Eigen/Core>
#include <cmath>
#include <complex>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lchain/numerics.hpp"

namespace lchain {

enum class PulseShape { Vacuum, ExponentialDecay, Gaussian, Rectangular, Sampled };

// One-sided evaluation at envelope discontinuities (which sit on grid nodes).
enum class Side { Left, Right };

class PulseSpec {
public:
    // No photon at all; drives nothing. Normalization invariants do not apply.
    static PulseSpec vacuum() { return PulseSpec(PulseShape::Vacuum); }

    // u(t) = sqrt(linewidth) exp(-linewidth t / 2) for t >= 0 (spontaneously
    // emitted photon from a distant source with natural linewidth `linewidth`).
    static PulseSpec exponential(double linewidth) {
        if (!(linewidth > 0.0) || !std::isfinite(linewidth))
            throw std::invalid_argument("PulseSpec: exponential linewidth must be finite and > 0");
        PulseSpec p(PulseShape::ExponentialDecay);
        p.width_ = linewidth;
        return p;
    }

    // |u(t)|^2 is a Gaussian of rms width sigma centered at t0 = front_sigmas*sigma,
    // clipped to t >= 0 and normalized exactly on the clipped support.
    static PulseSpec gaussian(double sigma, double front_sigmas = 8.0) {
        if (!(sigma > 0.0) || !std::isfinite(sigma))
            throw std::invalid_argument("PulseSpec: gaussian sigma must be finite and > 0");
        if (!(front_sigmas >= 4.0))
            throw std::invalid_argument("PulseSpec: gaussian front offset must be >= 4 sigma");
        PulseSpec p(PulseShape::Gaussian);
        p.width_ = sigma;
        p.center_ = front_sigmas * sigma;
        // int_0^inf exp(-(t-t0)^2/(2 sigma^2)) dt = sigma sqrt(pi/2) erfc(-t0/(sigma sqrt 2))
        const double clipped = sigma * std::sqrt(0.5 * M_PI) * std::erfc(-p.center_ / (sigma * std::sqrt(2.0)));
        p.amp_ = 1.0 / std::sqrt(clipped);
        return p;
    }

    // u(t) = 1/sqrt(duration) on [0, duration].
    static PulseSpec rectangular(double duration) {
        if (!(duration > 0.0) || !std::isfinite(duration))
            throw std::invalid_argument("PulseSpec: rectangular duration must be finite and > 0");
        PulseSpec p(PulseShape::Rectangular);
        p.width_ = duration;
        return p;
    }

    // Envelope given on a uniform time grid starting at t_begin >= 0.
    // Rejected unless the trapezoid norm is 1 within `norm_tol`.
    static PulseSpec sampled(double t_begin, double dt, Eigen::ArrayXcd values,
                             double norm_tol = 1e-6) {
        if (!(t_begin >= 0.0))
            throw std::invalid_argument("PulseSpec: sampled grid must start at t >= 0 (causal front)");
        if (!(dt > 0.0) || values.size() < 2)
            throw std::invalid_argument("PulseSpec: sampled grid needs dt > 0 and at least 2 samples");
        double norm = 0.0;
        for (Eigen::Index i = 0; i + 1 < values.size(); ++i)
            norm += 0.5 * dt * (std::norm(values[i]) + std::norm(values[i + 1]));
        if (std::abs(norm - 1.0) > norm_tol)
            throw std::invalid_argument("PulseSpec: sampled envelope is not unit-normalized");
        PulseSpec p(PulseShape::Sampled);
        p.sampled_ = std::make_shared<const SampledData>(SampledData{t_begin, dt, std::move(values), norm});
        return p;
    }

    PulseShape shape() const { return shape_; }
    double photon_number() const { return shape_ == PulseShape::Vacuum ? 0.0 : 1.0; }

    double linewidth() const { return require(PulseShape::ExponentialDecay), width_; }
    double sigma() const { return require(PulseShape::Gaussian), width_; }
    double gaussian_center() const { return require(PulseShape::Gaussian), center_; }
    double duration() const { return require(PulseShape::Rectangular), width_; }

    // Slowly varying temporal envelope u(t); right-continuous at jumps.
    std::complex<double> envelope(double t) const { return envelope(t, Side::Right); }

    std::complex<double> envelope(double t, Side side) const {
        switch (shape_) {
            case PulseShape::Vacuum:
                return 0.0;
            case PulseShape::ExponentialDecay: {
                if (t < 0.0 || (t == 0.0 && side == Side::Left)) return 0.0;
                return std::sqrt(width_) * std::exp(-0.5 * width_ * t);
            }
            case PulseShape::Gaussian: {
                if (t < 0.0 || (t == 0.0 && side == Side::Left)) return 0.0;
                const double s = (t - center_) / (2.0 * width_);
                return amp_ * std::exp(-s * s);
            }
            case PulseShape::Rectangular: {
                if (t < 0.0 || t > width_) return 0.0;
                if (t == 0.0 && side == Side::Left) return 0.0;
                if (t == width_ && side == Side::Right) return 0.0;
                return 1.0 / std::sqrt(width_);
            }
            case PulseShape::Sampled: {
                const auto& d = *sampled_;
                const double t_end = d.t_begin + d.dt * double(d.values.size() - 1);
                if (t < d.t_begin || (t == d.t_begin && side == Side::Left)) return 0.0;
                if (t > t_end || (t == t_end && side == Side::Right)) return 0.0;
                const double x = (t - d.t_begin) / d.dt;
                const auto i = static_cast<Eigen::Index>(std::floor(x));
                if (i + 1 >= d.values.size()) return d.values[d.values.size() - 1];
                const double w = x - double(i);
                return (1.0 - w) * d.values[i] + w * d.values[i + 1];
            }
        }
        return 0.0;
    }

    // du/dt inside the smooth pieces (one-sided at the piece boundaries).
    std::complex<double> envelope_derivative(double t, Side side = Side::Right) const {
        switch (shape_) {
            case PulseShape::Vacuum:
            case PulseShape::Rectangular:
                return envelope(t, side) * 0.0;
            case PulseShape::ExponentialDecay:
                return -0.5 * width_ * envelope(t, side);
            case PulseShape::Gaussian:
                return -(t - center_) / (2.0 * width_ * width_) * envelope(t, side);
            case PulseShape::Sampled: {
                const auto& d = *sampled_;
                const double t_end = d.t_begin + d.dt * double(d.values.size() - 1);
                if (t < d.t_begin || t > t_end) return 0.0;
                double x = (t - d.t_begin) / d.dt;
                auto i = static_cast<Eigen::Index>(side == Side::Left ? std::ceil(x) - 1.0 : std::floor(x));
                i = std::max<Eigen::Index>(0, std::min<Eigen::Index>(i, d.values.size() - 2));
                return (d.values[i + 1] - d.values[i]) / d.dt;
            }
        }
        return 0.0;
    }

    // Times where u jumps, with the jump u(t+) - u(t-). Integrators align
    // these on grid nodes; the reactive work functional picks them up as
    // boundary terms.
    std::vector<std::pair<double, std::complex<double>>> jumps() const {
        std::vector<std::pair<double, std::complex<double>>> j;
        switch (shape_) {
            case PulseShape::Vacuum:
                break;
            case PulseShape::ExponentialDecay:
                j.emplace_back(0.0, envelope(0.0, Side::Right));
                break;
            case PulseShape::Gaussian:
                j.emplace_back(0.0, envelope(0.0, Side::Right));  // ~e^{-front^2/4}, tiny
                break;
            case PulseShape::Rectangular:
                j.emplace_back(0.0, envelope(0.0, Side::Right));
                j.emplace_back(width_, -envelope(width_, Side::Left));
                break;
            case PulseShape::Sampled: {
                const auto& d = *sampled_;
                const double t_end = d.t_begin + d.dt * double(d.values.size() - 1);
                if (std::abs(d.values[0]) > 0.0) j.emplace_back(d.t_begin, d.values[0]);
                if (std::abs(d.values[d.values.size() - 1]) > 0.0)
                    j.emplace_back(t_end, -d.values[d.values.size() - 1]);
                break;
            }
        }
        return j;
    }

    // Node times the integration grid must hit exactly (envelope kinks/jumps).
    std::vector<double> breakpoints() const {
        std::vector<double> b;
        for (const auto& [t, jump] : jumps())
            if (t > 0.0) b.push_back(t);
        return b;
    }

    // Time by which all but ~1e-9 of the photon has passed the emitter.
    double support_end() const {
        switch (shape_) {
            case PulseShape::Vacuum: return 0.0;
            case PulseShape::ExponentialDecay: return std::log(1e9) / width_;
            case PulseShape::Gaussian: return center_ + 6.5 * width_;
            case PulseShape::Rectangular: return width_;
            case PulseShape::Sampled: {
                const auto& d = *sampled_;
                return d.t_begin + d.dt * double(d.values.size() - 1);
            }
        }
        return 0.0;
    }

    // Characteristic variation rate of the envelope (sets integrator steps).
    double bandwidth() const {
        switch (shape_) {
            case PulseShape::Vacuum: return 0.0;
            case PulseShape::ExponentialDecay: return width_;
            case PulseShape::Gaussian: return 1.0 / width_;
            case PulseShape::Rectangular: return 1.0 / width_;
            case PulseShape::Sampled: {
                const auto& d = *sampled_;
                double rate = 1.0 / (d.dt * double(d.values.size() - 1));
                double umax = 1e-300;
                for (Eigen::Index i = 0; i < d.values.size(); ++i)
                    umax = std::max(umax, std::abs(d.values[i]));
                for (Eigen::Index i = 0; i + 1 < d.values.size(); ++i)
                    rate = std::max(rate, std::abs(d.values[i + 1] - d.values[i]) / (d.dt * umax));
                return rate;
            }
        }
        return 0.0;
    }

    // Reporting-only mapping of the width parameter to a spectral FWHM of
    // |u(nu)|^2; never used inside physics formulas.
    double effective_linewidth() const {
        switch (shape_) {
            case PulseShape::Vacuum: return 0.0;
            case PulseShape::ExponentialDecay: return width_;
            case PulseShape::Gaussian: return std::sqrt(2.0 * std::log(2.0)) / width_;
            case PulseShape::Rectangular: return 5.566243 / width_;
            case PulseShape::Sampled: {
                const auto& d = *sampled_;
                return 1.0 / (d.dt * double(d.values.size() - 1));
            }
        }
        return 0.0;
    }

    // Fourier transform of the envelope, u_hat(nu) = int u(t) e^{i nu t} dt,
    // with nu the offset from the carrier. Parseval: (1/2pi) int |u_hat|^2 = 1.
    std::complex<double> spectrum(double nu) const {
        using namespace std::complex_literals;
        switch (shape_) {
            case PulseShape::Vacuum:
                return 0.0;
            case PulseShape::ExponentialDecay:
                return std::sqrt(width_) / std::complex<double>(0.5 * width_, -nu);
            case PulseShape::Gaussian: {
                const double s = nu * width_;
                return amp_ * 2.0 * width_ * std::sqrt(M_PI) * std::exp(-s * s) *
                       std::exp(1i * nu * center_);
            }
            case PulseShape::Rectangular: {
                const double T = width_;
                if (std::abs(nu * T) < 1e-8) {
                    // series of (e^{i nu T} - 1)/(i nu sqrt T)
                    return std::sqrt(T) * (1.0 + 1i * nu * T / 2.0 - nu * nu * T * T / 6.0);
                }
                return (std::exp(1i * nu * T) - 1.0) / (1i * nu * std::sqrt(T));
            }
            case PulseShape::Sampled: {
                const auto& d = *sampled_;
                std::complex<double> acc = 0.0;
                for (Eigen::Index i = 0; i + 1 < d.values.size(); ++i) {
                    const double t0 = d.t_begin + d.dt * double(i);
                    const double t1 = t0 + d.dt;
                    acc += 0.5 * d.dt * (d.values[i] * std::exp(1i * nu * t0) +
                                         d.values[i + 1] * std::exp(1i * nu * t1));
                }
                return acc;
            }
        }
        return 0.0;
    }

    bool has_analytic_spectral_cdf() const {
        return shape_ == PulseShape::ExponentialDecay || shape_ == PulseShape::Gaussian ||
               shape_ == PulseShape::Rectangular;
    }

    // S(nu) = (1/2pi) int_{-inf}^{nu} |u_hat|^2 dnu', with S(inf) = 1.
    double spectral_cdf(double nu) const {
        switch (shape_) {
            case PulseShape::ExponentialDecay:
                return 0.5 + std::atan(2.0 * nu / width_) / M_PI;
            case PulseShape::Gaussian:
                // clipped-front correction is ~1e-15 for front_sigmas >= 8
                return 0.5 * (1.0 + std::erf(nu * width_ * std::sqrt(2.0)));
            case PulseShape::Rectangular: {
                const double x = 0.5 * nu * width_;
                if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
                const double sinc_term = std::abs(x) < 1e-8 ? x : std::sin(x) * std::sin(x) / x;
                return 0.5 + (sine_integral(2.0 * x) - sinc_term) / M_PI;
            }
            default:
                throw std::domain_error("PulseSpec: spectral_cdf is analytic only for exponential/gaussian/rectangular");
        }
    }

private:
    struct SampledData {
        double t_begin;
        double dt;
        Eigen::ArrayXcd values;
        double norm;
    };

    explicit PulseSpec(PulseShape s) : shape_(s) {}

    void require(PulseShape s) const {
        if (shape_ != s) throw std::logic_error("PulseSpec: parameter not defined for this shape");
    }

    PulseShape shape_;
    double width_ = 0.0;   // linewidth / sigma / duration
    double center_ = 0.0;  // gaussian center time
    double amp_ = 0.0;     // gaussian normalization
    std::shared_ptr<const SampledData> sampled_;
};

// Drive envelope entering the reduced amplitude equation: sqrt(gamma) u(t).
// (This is g phi^e(-ct, 0); g and the mode density combine into gamma.)
inline std::complex<double> drive_envelope(const PulseSpec& pulse, double gamma, double t,
                                           Side side = Side::Right) {
    return std::sqrt(gamma) * pulse.envelope(t, side);
}

// Full drive value g F(-ct, 0) including the optical carrier.
inline std::complex<double> pulse_drive(const PulseSpec& pulse, double gamma, double omega_L,
                                        double t) {
    using namespace std::complex_literals;
    return drive_envelope(pulse, gamma, t) * std::exp(-1i * omega_L * t);
}

}  // namespace lchain
