#pragma once

#include <cstdint>
#include <vector>

#include "attention.hpp"
#include "rng.hpp"

namespace bansa {

// Cumulative signal-retention schedule, indexed by timestep 1..T with the
// convention alpha_bar(0) = 1.
class NoiseSchedule {
public:
    static NoiseSchedule linear(std::size_t steps, double first = 0.9999, double last = 0.02);
    static NoiseSchedule from_values(std::vector<double> alphas_bar);

    std::size_t steps() const { return alphas_bar_.size(); }
    double alpha_bar(std::size_t t) const;

private:
    std::vector<double> alphas_bar_;
};

struct LatentState {
    std::size_t tokens = 0;
    std::size_t dim = 0;
    Matrix data;  // tokens x dim
    std::size_t t = 0;
};

struct PromptEmbedding {
    std::vector<double> vector;
    std::uint64_t prompt_id = 0;
};

// Synthetic conditioning vector; unit-variance Gaussian entries keyed by
// (prompt_seed, prompt_id).
PromptEmbedding make_prompt(std::uint64_t prompt_seed, std::uint64_t prompt_id,
                            std::size_t dim);

struct DenoiserSizes {
    std::size_t dim = 8;
    std::size_t layers = 8;
    std::size_t steps = 50;  // only used to normalize the timestep factor
};

// Fixed-weight stand-in for a trained denoiser. Per-layer query/key/value
// projections share a common base plus a per-layer component whose magnitude
// is layer_variation; 0 makes every layer identical. All weights are a pure
// function of the model seed.
class ToyDenoiser {
public:
    ToyDenoiser(std::uint64_t model_seed, DenoiserSizes sizes, double layer_variation);

    std::size_t layers() const { return sizes_.layers; }
    std::size_t dim() const { return sizes_.dim; }
    std::uint64_t model_seed() const { return model_seed_; }
    double layer_variation() const { return layer_variation_; }

    // Pre-softmax attention scores for the first `max_layers` layers.
    std::vector<Matrix> attention_logits(const LatentState& z, const PromptEmbedding& prompt,
                                         std::size_t t, std::size_t max_layers) const;

    // Softmax of the logits for every layer.
    std::vector<AttentionMap> attention_probe(const LatentState& z,
                                              const PromptEmbedding& prompt,
                                              std::size_t t) const;

    // Noise prediction: attention-mixed values of the final layer through a
    // fixed output projection.
    Matrix predict_noise(const LatentState& z, const PromptEmbedding& prompt,
                         std::size_t t) const;

private:
    Matrix conditioned_tokens(const LatentState& z, const PromptEmbedding& prompt) const;
    double timestep_factor(std::size_t t) const;

    std::uint64_t model_seed_;
    DenoiserSizes sizes_;
    double layer_variation_;
    std::vector<Matrix> w_q_, w_k_, w_v_;
    Matrix w_out_;
    Matrix coupling_;
};

// z_t = sqrt(alpha_bar_t) z0 + sqrt(1 - alpha_bar_t) eps
LatentState forward_noise_with(const LatentState& z0, std::size_t t,
                               const NoiseSchedule& sched, const Matrix& eps);
LatentState forward_noise(const LatentState& z0, std::size_t t, const NoiseSchedule& sched,
                          RngStream stream);

// zhat_0 = (z_t - sqrt(1 - alpha_bar_t) eps_hat) / sqrt(alpha_bar_t)
Matrix tweedie_estimate(const LatentState& z_t, const Matrix& eps_hat, std::size_t t,
                       const NoiseSchedule& sched);

// The update is implemented exactly as published (zhat_0 scaled by
// sqrt(alpha_bar_t)); `standard` switches to the sqrt(alpha_bar_{t-1})
// convention for comparison.
enum class DdimConvention { as_written, standard };

LatentState ddim_step(const LatentState& z_t, const Matrix& eps_hat, std::size_t t,
                      const NoiseSchedule& sched, DdimConvention convention);

struct TrajectoryRecord {
    std::vector<LatentState> states;  // ordered by decreasing t
    std::uint64_t seed_id = 0;
};

struct RolloutResult {
    LatentState final_state;
    TrajectoryRecord trajectory;
};

// Deterministic full denoising pass from z_T down to t=0.
RolloutResult rollout(const ToyDenoiser& denoiser, LatentState z_T,
                      const PromptEmbedding& prompt, const NoiseSchedule& sched,
                      DdimConvention convention);

}  // namespace bansa
