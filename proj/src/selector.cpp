#include "selector.hpp"

#include "acquisition.hpp"
#include "errors.hpp"

namespace bansa {

std::vector<SeedCandidate> build_pool(std::size_t m, std::uint64_t base_seed,
                                      std::size_t tokens, std::size_t dim) {
    if (m < 1) {
        fail(ErrorCode::invalid_input, "pool size must be at least 1");
    }
    std::vector<SeedCandidate> pool;
    pool.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        RngStream stream = make_stream(base_seed, "pool", i);
        SeedCandidate candidate;
        candidate.seed_id = i;
        candidate.rng_seed = stream.key();
        candidate.latent.tokens = tokens;
        candidate.latent.dim = dim;
        candidate.latent.data = random_gaussian(tokens, dim, stream);
        pool.push_back(std::move(candidate));
    }
    return pool;
}

namespace {

// Advance a latent deterministically from its current timestep down to
// `target` with DDIM updates.
LatentState advance_to(LatentState state, std::size_t target, const ToyDenoiser& denoiser,
                       const PromptEmbedding& prompt, const NoiseSchedule& sched,
                       DdimConvention convention) {
    while (state.t > target) {
        const Matrix eps_hat = denoiser.predict_noise(state, prompt, state.t);
        state = ddim_step(state, eps_hat, state.t, sched, convention);
    }
    return state;
}

std::vector<double> score_one_seed(const SeedCandidate& seed, const ToyDenoiser& denoiser,
                                   const PromptEmbedding& prompt, const NoiseSchedule& sched,
                                   const ScoreOptions& options) {
    std::vector<double> per_layer(options.depth, 0.0);

    LatentState state = seed.latent;
    state.t = sched.steps();
    state = advance_to(state, options.probe_timestep, denoiser, prompt, sched,
                       options.ddim_convention);

    // Masking and jitter noise is shared across seeds and layers (one stream
    // per window step): paired comparisons, so identical latents score
    // identically and identical layers correlate exactly. The random baseline
    // must differ per seed or selection would always tie-break to seed 0.
    const char* role = options.acquisition == AcquisitionKind::bansa_d ? "jitter" : "mask";
    const RngStream noise_stream =
        options.acquisition == AcquisitionKind::random
            ? make_stream(options.stochastic_seed, "acq-random", seed.seed_id)
            : make_stream(options.stochastic_seed, role);

    for (std::size_t w = 0; w < options.probe_window; ++w) {
        const std::size_t t = state.t;
        const std::vector<Matrix> logits =
            denoiser.attention_logits(state, prompt, t, options.depth);
        for (std::size_t l = 0; l < options.depth; ++l) {
            RngStream sub = noise_stream.split(w);
            double value = 0.0;
            switch (options.acquisition) {
                case AcquisitionKind::bansa_b:
                    value = bansa_e(softmax_rows(logits[l]), options.k, options.drop_prob,
                                    sub).value;
                    break;
                case AcquisitionKind::bansa_d:
                    value = bansa_score(jitter_ensemble(logits[l], options.k,
                                                        options.jitter_scale, sub))
                                .value;
                    break;
                case AcquisitionKind::entropy:
                    value = predictive_entropy_score(make_ensemble(
                                softmax_rows(logits[l]), options.k, options.drop_prob, sub))
                                .value;
                    break;
                case AcquisitionKind::random:
                    value = sub.next_unit();
                    break;
            }
            per_layer[l] += value;
        }
        if (w + 1 < options.probe_window) {
            const Matrix eps_hat = denoiser.predict_noise(state, prompt, state.t);
            state = ddim_step(state, eps_hat, state.t, sched, options.ddim_convention);
        }
    }
    if (options.probe_window > 1) {
        for (double& v : per_layer) {
            v /= static_cast<double>(options.probe_window);
        }
    }
    return per_layer;
}

}  // namespace

PoolScores score_pool(const std::vector<SeedCandidate>& pool, const ToyDenoiser& denoiser,
                      const PromptEmbedding& prompt, const NoiseSchedule& sched,
                      const ScoreOptions& options) {
    if (pool.empty()) {
        fail(ErrorCode::invalid_input, "cannot score an empty pool");
    }
    if (options.depth < 1 || options.depth > denoiser.layers()) {
        fail(ErrorCode::invalid_input, "scored depth out of range");
    }
    if (options.probe_timestep < 1 || options.probe_timestep > sched.steps()) {
        fail(ErrorCode::invalid_input, "probe timestep out of schedule range");
    }
    if (options.probe_window > options.probe_timestep) {
        fail(ErrorCode::invalid_input, "probe window extends past the schedule start");
    }

    std::vector<std::vector<double>> rows;
    std::vector<std::uint64_t> ids;
    rows.reserve(pool.size());
    ids.reserve(pool.size());
    for (const auto& seed : pool) {
        rows.push_back(score_one_seed(seed, denoiser, prompt, sched, options));
        ids.push_back(seed.seed_id);
    }

    PoolScores result{ScoreTable::from_rows(std::move(rows), std::move(ids)), {}};
    result.truncated = truncated_pool_scores(result.table, options.depth - 1);
    return result;
}

std::size_t select(std::span<const double> scores, SelectionCriterion criterion) {
    if (scores.empty()) {
        fail(ErrorCode::invalid_input, "cannot select from an empty score list");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        const bool better = criterion == SelectionCriterion::argmin
                                ? scores[i] < scores[best]
                                : scores[i] > scores[best];
        if (better) best = i;
    }
    return best;
}

}  // namespace bansa
