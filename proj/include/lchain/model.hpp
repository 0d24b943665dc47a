// model.hpp — physical parameters, unit conventions, and gene-string data
//
// Natural units hbar = c = 1 throughout. All frequencies, rates and energies
// are quoted in units of the decay rate gamma unless a caller converts them.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace lchain {

// Physical constants of one gene-base / environment-base / field problem.
struct ModelParams {
    double gamma = 1.0;       // decay rate of the excited level into each photon family
    double omega_b0 = 0.0;    // unperturbed b->e transition frequency
    double delta_a0 = 0.0;    // frequency of the low-lying a level
    double omega_L = 0.0;     // central frequency of the incident pulse (set by the source)
    double coupling_J = 0.0;  // Ising shift of the environment-base line when the gene base is "A"

    void validate() const {
        if (!(gamma > 0.0) || !std::isfinite(gamma))
            throw std::invalid_argument("ModelParams: gamma must be finite and > 0");
        if (!(omega_b0 >= 0.0) || !std::isfinite(omega_b0))
            throw std::invalid_argument("ModelParams: omega_b0 must be finite and >= 0");
        if (!(omega_L >= 0.0) || !std::isfinite(omega_L))
            throw std::invalid_argument("ModelParams: omega_L must be finite and >= 0");
        if (!std::isfinite(delta_a0) || delta_a0 > omega_b0)
            throw std::invalid_argument("ModelParams: delta_a0 must be finite and <= omega_b0 (a is a low-lying level)");
        if (!std::isfinite(coupling_J))
            throw std::invalid_argument("ModelParams: coupling_J must be finite");
    }
};

// Derived view of the two detunings that control the branch dynamics.
// delta_LbJ = delta_Lb - J holds exactly by construction.
struct Detunings {
    double delta_LbJ;  // omega_L - (omega_b0 + J), shifted line
    double delta_Lb;   // omega_L - omega_b0, bare line
};

inline Detunings detunings(const ModelParams& p) {
    const double d_lb = p.omega_L - p.omega_b0;
    return Detunings{d_lb - p.coupling_J, d_lb};
}

// Base alphabet. "A" bases gate replication, "B" bases should stay dormant.
enum class Base : char { A = 'A', B = 'B' };

// Classical string over {A, B}; superpositions of bases are out of scope.
class GeneString {
public:
    explicit GeneString(std::vector<Base> bases) : bases_(std::move(bases)) {
        if (bases_.empty())
            throw std::invalid_argument("GeneString: gene must contain at least one base");
    }

    static GeneString from_string(const std::string& s) {
        std::vector<Base> b;
        b.reserve(s.size());
        for (char c : s) {
            if (c != 'A' && c != 'B')
                throw std::invalid_argument("GeneString: alphabet is exactly {A, B}, got '" + std::string(1, c) + "'");
            b.push_back(static_cast<Base>(c));
        }
        return GeneString(std::move(b));
    }

    std::size_t size() const { return bases_.size(); }
    Base operator[](std::size_t n) const { return bases_[n]; }
    const std::vector<Base>& bases() const { return bases_; }

    std::string str() const {
        std::string s;
        s.reserve(bases_.size());
        for (Base b : bases_) s.push_back(static_cast<char>(b));
        return s;
    }

    std::size_t hamming_distance(const GeneString& other) const {
        if (other.size() != size())
            throw std::invalid_argument("GeneString: length mismatch in hamming_distance");
        std::size_t d = 0;
        for (std::size_t n = 0; n < size(); ++n)
            if (bases_[n] != other.bases_[n]) ++d;
        return d;
    }

    bool operator==(const GeneString& other) const { return bases_ == other.bases_; }

private:
    std::vector<Base> bases_;
};

// Inverse-cube coupling law J(r) = J0 (r0/r)^3; monotone decreasing, J(inf) = 0.
struct CouplingLaw {
    double j0 = 0.0;  // coupling at reference distance
    double r0 = 1.0;  // reference distance

    void validate() const {
        if (!(j0 >= 0.0) || !std::isfinite(j0))
            throw std::invalid_argument("CouplingLaw: j0 must be finite and >= 0");
        if (!(r0 > 0.0) || !std::isfinite(r0))
            throw std::invalid_argument("CouplingLaw: r0 must be finite and > 0");
    }
};

inline double coupling_from_distance(double r, double j0, double r0) {
    if (std::isnan(r) || r <= 0.0)
        throw std::domain_error("coupling_from_distance: distance must be > 0");
    const double q = r0 / r;
    return j0 * q * q * q;
}

inline double coupling_from_distance(double r, const CouplingLaw& law) {
    return coupling_from_distance(r, law.j0, law.r0);
}

// Distance that tunes J(r) to a target shift (enzyme-like resonance J = delta_Lb).
inline double enzyme_tuned_distance(double target_J, const CouplingLaw& law) {
    law.validate();
    if (!(target_J > 0.0))
        throw std::domain_error("enzyme_tuned_distance: target shift must be > 0");
    return law.r0 * std::cbrt(law.j0 / target_J);
}

// Per-site distances between gene base n and its environment base, plus the law.
struct DistanceProfile {
    std::vector<double> distances;  // r_n > 0 (may be +inf: fully decoupled site)
    CouplingLaw law;

    void validate() const {
        law.validate();
        if (distances.empty())
            throw std::invalid_argument("DistanceProfile: needs at least one distance");
        for (double r : distances)
            if (std::isnan(r) || r <= 0.0)
                throw std::invalid_argument("DistanceProfile: distances must be > 0");
    }

    std::size_t size() const { return distances.size(); }
    double coupling_at(std::size_t n) const { return coupling_from_distance(distances[n], law); }
};

}  // namespace lchain
