// rng.hpp — deterministic, counter-split random streams
//
// Every Monte Carlo trial gets its own stream derived from (master_seed,
// stream_index), so trials can run in any order on any number of workers and
// still reproduce bit-identically. Distributions are hand-rolled on top of
// the fully specified mt19937_64 engine to keep draws portable.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace lchain {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index) {
        std::uint64_t s = master_seed ^ (stream_index * 0xD1342543DE82EF95ULL + 0x632BE59BD9B4E019ULL);
        const std::uint64_t seed = splitmix64(s) ^ splitmix64(s);
        engine_.seed(seed);
    }

    // uniform on [0, 1) with 53 random bits
    double uniform01() { return double(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    // Box-Muller; the spare deviate is cached
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * M_PI * uniform01();
        spare_ = r * std::sin(phi);
        have_spare_ = true;
        return r * std::cos(phi);
    }

    // Marsaglia-Tsang squeeze for shape >= 1, boosted for shape < 1
    double gamma(double shape, double scale) {
        if (!(shape > 0.0) || !(scale > 0.0))
            throw std::domain_error("RngStream::gamma: shape and scale must be > 0");
        if (shape < 1.0) {
            const double u = uniform01();
            return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform01();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
        }
    }

    double log_uniform(double lo, double hi) {
        if (!(lo > 0.0) || !(hi >= lo))
            throw std::domain_error("RngStream::log_uniform: need 0 < lo <= hi");
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace lchain
