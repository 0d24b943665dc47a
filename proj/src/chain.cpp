#include "lchain/chain.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace lchain {

OutcomeProbs base_probabilities(Base base, double r, double delta_pulse,
                                const ModelParams& params, const CouplingLaw& law) {
    params.validate();
    OutcomeProbs probs;
    if (base == Base::A) {
        const double J = coupling_from_distance(r, law);
        ModelParams shifted = params;
        shifted.coupling_J = J;
        const double p = transition_probability(delta_pulse, detunings(shifted).delta_LbJ,
                                                params.gamma);
        probs.replicated = p;
        probs.failed = 1.0 - p;
    } else {
        const double p = transition_probability(delta_pulse, detunings(params).delta_Lb,
                                                params.gamma);
        probs.mutated = p;
        probs.dormant = 1.0 - p;
    }
    return probs;
}

DisorderSpec DisorderSpec::fixed(double delta) {
    DisorderSpec d;
    d.kind = Kind::Fixed;
    d.fixed_delta = delta;
    d.validate();
    return d;
}

DisorderSpec DisorderSpec::log_uniform(double lo, double hi) {
    DisorderSpec d;
    d.kind = Kind::LogUniform;
    d.min = lo;
    d.max = hi;
    d.validate();
    return d;
}

DisorderSpec DisorderSpec::gamma_family(double shape, double scale) {
    DisorderSpec d;
    d.kind = Kind::Gamma;
    d.shape = shape;
    d.scale = scale;
    d.validate();
    return d;
}

void DisorderSpec::validate() const {
    switch (kind) {
        case Kind::Fixed:
            if (!(fixed_delta > 0.0))
                throw std::invalid_argument("DisorderSpec: fixed linewidth must be > 0");
            break;
        case Kind::LogUniform:
            if (!(min > 0.0) || !(max >= min))
                throw std::invalid_argument("DisorderSpec: log-uniform needs 0 < min <= max");
            break;
        case Kind::Gamma:
            if (!(shape > 0.0) || !(scale > 0.0))
                throw std::invalid_argument("DisorderSpec: gamma needs shape > 0 and scale > 0");
            break;
    }
}

double DisorderSpec::sample(RngStream& rng) const {
    switch (kind) {
        case Kind::Fixed: return fixed_delta;
        case Kind::LogUniform: return rng.log_uniform(min, max);
        case Kind::Gamma: {
            double v = rng.gamma(shape, scale);
            while (!(v > 0.0)) v = rng.gamma(shape, scale);
            return v;
        }
    }
    return fixed_delta;
}

int OutcomeRecord::mutation_count() const {
    return int(std::count(outcomes.begin(), outcomes.end(), Outcome::Mutated));
}

int OutcomeRecord::replicated_count() const {
    return int(std::count(outcomes.begin(), outcomes.end(), Outcome::Replicated));
}

double OutcomeRecord::total_work() const {
    double w = 0.0;
    for (double x : absorbed_work) w += x;
    return w;
}

double OutcomeRecord::fidelity(const GeneString& original) const {
    return 1.0 - double(copy.hamming_distance(original)) / double(original.size());
}

OutcomeRecord replicate_gene(const GeneString& gene, const DistanceProfile& profile,
                             const DisorderSpec& disorder, const ModelParams& params,
                             std::uint64_t master_seed, std::uint64_t trial_index) {
    params.validate();
    profile.validate();
    disorder.validate();
    if (gene.size() != profile.size())
        throw std::invalid_argument("replicate_gene: gene and distance profile lengths differ");

    RngStream rng(master_seed, trial_index);
    const Detunings det = detunings(params);

    std::vector<Outcome> outcomes(gene.size());
    std::vector<Base> copy(gene.size());
    std::vector<double> work(gene.size());

    for (std::size_t n = 0; n < gene.size(); ++n) {
        const double delta_pulse = disorder.sample(rng);
        const OutcomeProbs probs =
            base_probabilities(gene[n], profile.distances[n], delta_pulse, params, profile.law);
        const bool flipped =
            rng.bernoulli(gene[n] == Base::A ? probs.replicated : probs.mutated);
        if (gene[n] == Base::A) {
            outcomes[n] = flipped ? Outcome::Replicated : Outcome::Failed;
        } else {
            outcomes[n] = flipped ? Outcome::Mutated : Outcome::Dormant;
        }
        copy[n] = flipped ? Base::A : Base::B;
        if (flipped) {
            // expected-per-event accounting: 2 omega_L chi'' at this base's detuning
            const double detuning = gene[n] == Base::A
                                        ? det.delta_Lb - coupling_from_distance(
                                                             profile.distances[n], profile.law)
                                        : det.delta_Lb;
            work[n] = 2.0 * params.omega_L * susceptibility(detuning, params.gamma).chi_im;
        } else {
            work[n] = 0.0;
        }
    }
    return OutcomeRecord{std::move(outcomes), GeneString(std::move(copy)), std::move(work)};
}

namespace {

struct ChunkPartial {
    double fidelity_sum = 0.0;
    double fidelity_sq_sum = 0.0;
    double work_sum = 0.0;
    double a_work_sum = 0.0;
    std::uint64_t replicated = 0;
    std::uint64_t mutated = 0;
    std::vector<std::uint64_t> mutation_histogram;
};

}  // namespace

EnsembleStats ensemble_stats(const GeneString& gene, const DistanceProfile& profile,
                             const DisorderSpec& disorder, const ModelParams& params,
                             std::uint64_t trials, std::uint64_t master_seed, int threads) {
    if (trials < 1) throw std::invalid_argument("ensemble_stats: need at least one trial");
    if (gene.size() != profile.size())
        throw std::invalid_argument("ensemble_stats: gene and distance profile lengths differ");

    const std::uint64_t chunk_size = 1024;  // fixed, so results never depend on thread count
    const std::uint64_t n_chunks = (trials + chunk_size - 1) / chunk_size;
    std::vector<ChunkPartial> partials(n_chunks);

    std::size_t n_a = 0, n_b = 0;
    for (std::size_t n = 0; n < gene.size(); ++n)
        (gene[n] == Base::A ? n_a : n_b)++;

    auto run_chunk = [&](std::uint64_t chunk) {
        ChunkPartial part;
        part.mutation_histogram.assign(gene.size() + 1, 0);
        const std::uint64_t begin = chunk * chunk_size;
        const std::uint64_t end = std::min(trials, begin + chunk_size);
        for (std::uint64_t trial = begin; trial < end; ++trial) {
            const OutcomeRecord rec =
                replicate_gene(gene, profile, disorder, params, master_seed, trial);
            const double f = rec.fidelity(gene);
            part.fidelity_sum += f;
            part.fidelity_sq_sum += f * f;
            part.work_sum += rec.total_work();
            for (std::size_t n = 0; n < gene.size(); ++n)
                if (gene[n] == Base::A) part.a_work_sum += rec.absorbed_work[n];
            part.replicated += std::uint64_t(rec.replicated_count());
            const int mut = rec.mutation_count();
            part.mutated += std::uint64_t(mut);
            part.mutation_histogram[std::size_t(mut)]++;
        }
        partials[chunk] = std::move(part);
    };

    const int n_workers = std::max(1, std::min<int>(threads, int(n_chunks)));
    if (n_workers == 1) {
        for (std::uint64_t c = 0; c < n_chunks; ++c) run_chunk(c);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(std::size_t(n_workers));
        for (int w = 0; w < n_workers; ++w)
            pool.emplace_back([&] {
                for (std::uint64_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1))
                    run_chunk(c);
            });
        for (auto& th : pool) th.join();
    }

    // index-ordered reduction
    double f_sum = 0.0, f_sq = 0.0, w_sum = 0.0, aw_sum = 0.0;
    std::uint64_t replicated = 0, mutated = 0;
    std::vector<std::uint64_t> histogram(gene.size() + 1, 0);
    for (const ChunkPartial& part : partials) {
        f_sum += part.fidelity_sum;
        f_sq += part.fidelity_sq_sum;
        w_sum += part.work_sum;
        aw_sum += part.a_work_sum;
        replicated += part.replicated;
        mutated += part.mutated;
        for (std::size_t k = 0; k < histogram.size(); ++k) histogram[k] += part.mutation_histogram[k];
    }

    EnsembleStats stats;
    stats.trials = trials;
    const double n = double(trials);
    stats.fidelity_mean = f_sum / n;
    const double var = std::max(0.0, f_sq / n - stats.fidelity_mean * stats.fidelity_mean);
    stats.fidelity_ci_halfwidth = trials > 1 ? 1.96 * std::sqrt(var / (n - 1.0)) : 0.0;
    stats.mutation_histogram = std::move(histogram);
    stats.mean_total_work = w_sum / n;
    stats.mean_work_per_a_base = n_a ? aw_sum / (n * double(n_a)) : 0.0;
    stats.replication_rate = n_a ? double(replicated) / (n * double(n_a)) : 0.0;
    stats.mutation_rate = n_b ? double(mutated) / (n * double(n_b)) : 0.0;
    return stats;
}

}  // namespace lchain
