#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "config.hpp"
#include "layer_probe.hpp"
#include "toy_diffusion.hpp"

namespace bansa {

struct SeedCandidate {
    std::uint64_t seed_id = 0;   // pool index; also the tie-break order
    std::uint64_t rng_seed = 0;  // key of the stream that produced the latent
    LatentState latent;          // the sampled z_T
    std::optional<double> score;
};

// M standard-normal latents from disjoint sub-streams of base_seed.
std::vector<SeedCandidate> build_pool(std::size_t m, std::uint64_t base_seed,
                                      std::size_t tokens, std::size_t dim);

struct ScoreOptions {
    std::size_t k = 10;
    double drop_prob = 0.2;
    std::size_t depth = 8;           // number of layers scored
    std::size_t probe_timestep = 50;
    std::size_t probe_window = 1;
    AcquisitionKind acquisition = AcquisitionKind::bansa_b;
    double jitter_scale = 0.1;
    std::uint64_t stochastic_seed = 0;  // keys the masking / jitter streams
    DdimConvention ddim_convention = DdimConvention::as_written;
};

struct PoolScores {
    ScoreTable table;               // one row per seed, one column per scored layer
    std::vector<double> truncated;  // cumulative mean at the last scored layer
};

// Scores each seed at the probe timestep: per-layer acquisition values for
// layers 0..depth-1, averaged cumulatively for the selection score. Rows are
// ordered by pool order and the whole result is a pure function of its
// arguments, so seeds may be scored concurrently and merged by index.
PoolScores score_pool(const std::vector<SeedCandidate>& pool, const ToyDenoiser& denoiser,
                      const PromptEmbedding& prompt, const NoiseSchedule& sched,
                      const ScoreOptions& options);

// Index of the extremum; ties go to the lowest index (= smallest seed_id).
std::size_t select(std::span<const double> scores, SelectionCriterion criterion);

}  // namespace bansa
