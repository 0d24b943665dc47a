// chain.hpp — Monte Carlo replication of an N-base gene
//
// Replication is modular: each base is copied independently by one photon per
// replication round. A bases admit {Replicated, Failed}, B bases
// {Dormant, Mutated}; the copy ends in "A" exactly when the photon flipped
// the environment base. Copy errors are asymmetric by construction: B -> A
// mutations occur, while an A-base miss shows up as Failed (copy stays "B").
// Failed copies are not retried.

#pragma once

#include <cstdint>
#include <vector>

#include "lchain/analytic.hpp"
#include "lchain/model.hpp"
#include "lchain/rng.hpp"

namespace lchain {

enum class Outcome : char { Replicated = 'R', Failed = 'F', Dormant = 'D', Mutated = 'M' };

// Distribution over the two outcomes admissible for a base kind; the other
// two entries are exactly zero.
struct OutcomeProbs {
    double replicated = 0.0;
    double failed = 0.0;
    double dormant = 0.0;
    double mutated = 0.0;
};

// A base: flip probability at the shifted detuning using J(r); B base: flip
// probability at the bare detuning (distance enters only through the gene
// base acting as the switch).
OutcomeProbs base_probabilities(Base base, double r, double delta_pulse,
                                const ModelParams& params, const CouplingLaw& law);

// Per-pulse linewidth disorder. Samples are always > 0.
struct DisorderSpec {
    enum class Kind { Fixed, LogUniform, Gamma };
    Kind kind = Kind::Fixed;
    double fixed_delta = 0.0;          // Fixed
    double min = 0.0, max = 0.0;       // LogUniform bounds
    double shape = 0.0, scale = 0.0;   // Gamma parameters

    static DisorderSpec fixed(double delta);
    static DisorderSpec log_uniform(double lo, double hi);
    static DisorderSpec gamma_family(double shape, double scale);

    double sample(RngStream& rng) const;
    void validate() const;
};

struct OutcomeRecord {
    std::vector<Outcome> outcomes;      // one per base
    GeneString copy;                    // resulting gene string
    std::vector<double> absorbed_work;  // per-base work ledger (expected-per-event accounting)

    int mutation_count() const;
    int replicated_count() const;
    double total_work() const;
    double fidelity(const GeneString& original) const;  // 1 - hamming/N
};

// One replication round; deterministic for fixed (master_seed, trial_index).
OutcomeRecord replicate_gene(const GeneString& gene, const DistanceProfile& profile,
                             const DisorderSpec& disorder, const ModelParams& params,
                             std::uint64_t master_seed, std::uint64_t trial_index = 0);

struct EnsembleStats {
    std::uint64_t trials = 0;
    double fidelity_mean = 0.0;
    double fidelity_ci_halfwidth = 0.0;           // 95% normal-approximation CI
    std::vector<std::uint64_t> mutation_histogram;  // index = mutations per trial
    double mean_total_work = 0.0;
    double mean_work_per_a_base = 0.0;  // 0 when the gene has no A bases
    double replication_rate = 0.0;      // empirical per-A-base flip frequency
    double mutation_rate = 0.0;         // empirical per-B-base flip frequency
};

// Trials are split into fixed-size chunks pulled by a worker pool; chunk
// partials are reduced in index order, so the statistics are bit-identical
// for any thread count.
EnsembleStats ensemble_stats(const GeneString& gene, const DistanceProfile& profile,
                             const DisorderSpec& disorder, const ModelParams& params,
                             std::uint64_t trials, std::uint64_t master_seed, int threads = 1);

}  // namespace lchain
