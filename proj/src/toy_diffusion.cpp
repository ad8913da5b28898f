#include "toy_diffusion.hpp"

#include <cmath>

#include "errors.hpp"

namespace bansa {

NoiseSchedule NoiseSchedule::linear(std::size_t steps, double first, double last) {
    if (steps < 1) {
        fail(ErrorCode::invalid_input, "schedule needs at least one step");
    }
    if (!(first > last && first <= 1.0 && last > 0.0)) {
        fail(ErrorCode::invalid_input, "schedule endpoints must satisfy 1 >= first > last > 0");
    }
    std::vector<double> values(steps);
    if (steps == 1) {
        values[0] = first;
    } else {
        const double span = first - last;
        for (std::size_t i = 0; i < steps; ++i) {
            values[i] = first - span * static_cast<double>(i) / static_cast<double>(steps - 1);
        }
    }
    return from_values(std::move(values));
}

NoiseSchedule NoiseSchedule::from_values(std::vector<double> alphas_bar) {
    if (alphas_bar.empty()) {
        fail(ErrorCode::invalid_input, "schedule needs at least one step");
    }
    for (std::size_t i = 0; i < alphas_bar.size(); ++i) {
        if (!(alphas_bar[i] > 0.0 && alphas_bar[i] <= 1.0)) {
            fail(ErrorCode::invalid_input, "schedule values must lie in (0, 1]");
        }
        if (i > 0 && !(alphas_bar[i] < alphas_bar[i - 1])) {
            fail(ErrorCode::invalid_input, "schedule must be strictly decreasing");
        }
    }
    NoiseSchedule sched;
    sched.alphas_bar_ = std::move(alphas_bar);
    return sched;
}

double NoiseSchedule::alpha_bar(std::size_t t) const {
    if (t == 0) return 1.0;
    if (t > alphas_bar_.size()) {
        fail(ErrorCode::invalid_input, "timestep out of schedule range");
    }
    return alphas_bar_[t - 1];
}

PromptEmbedding make_prompt(std::uint64_t prompt_seed, std::uint64_t prompt_id,
                            std::size_t dim) {
    RngStream stream = make_stream(prompt_seed, "prompt", prompt_id);
    PromptEmbedding prompt;
    prompt.prompt_id = prompt_id;
    prompt.vector.resize(dim);
    for (double& v : prompt.vector) {
        v = stream.next_gaussian();
    }
    return prompt;
}

ToyDenoiser::ToyDenoiser(std::uint64_t model_seed, DenoiserSizes sizes,
                         double layer_variation)
    : model_seed_(model_seed), sizes_(sizes), layer_variation_(layer_variation) {
    if (sizes.dim < 1 || sizes.layers < 1 || sizes.steps < 1) {
        fail(ErrorCode::invalid_input, "denoiser sizes must be positive");
    }
    if (!(layer_variation >= 0.0)) {
        fail(ErrorCode::invalid_input, "layer variation must be nonnegative");
    }
    const double weight_sd = 1.0 / std::sqrt(static_cast<double>(sizes.dim));

    auto base = [&](std::string_view role) {
        RngStream stream = make_stream(model_seed, role, 0);
        return random_gaussian(sizes.dim, sizes.dim, stream, weight_sd);
    };
    auto layer_part = [&](std::string_view role, std::size_t layer) {
        RngStream stream = make_stream(model_seed, role, layer);
        return random_gaussian(sizes.dim, sizes.dim, stream, weight_sd);
    };

    const Matrix base_q = base("wq-base");
    const Matrix base_k = base("wk-base");
    const Matrix base_v = base("wv-base");
    w_q_.reserve(sizes.layers);
    w_k_.reserve(sizes.layers);
    w_v_.reserve(sizes.layers);
    for (std::size_t l = 0; l < sizes.layers; ++l) {
        // Idiosyncratic weight components fade with depth, so deep layers
        // share structure while shallow ones diverge.
        const double strength = layer_variation * std::pow(0.6, static_cast<double>(l));
        w_q_.push_back(add(base_q, scale(layer_part("wq-layer", l), strength)));
        w_k_.push_back(add(base_k, scale(layer_part("wk-layer", l), strength)));
        w_v_.push_back(add(base_v, scale(layer_part("wv-layer", l), strength)));
    }
    w_out_ = base("w-out");
    coupling_ = base("prompt-coupling");
}

Matrix ToyDenoiser::conditioned_tokens(const LatentState& z,
                                       const PromptEmbedding& prompt) const {
    if (z.dim != sizes_.dim) {
        fail(ErrorCode::shape_mismatch, "latent width does not match denoiser width");
    }
    if (prompt.vector.size() != sizes_.dim) {
        fail(ErrorCode::shape_mismatch, "prompt width does not match denoiser width");
    }
    // Every token receives the same projected conditioning vector.
    std::vector<double> coupled(sizes_.dim, 0.0);
    for (std::size_t i = 0; i < sizes_.dim; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < sizes_.dim; ++j) {
            acc += coupling_(i, j) * prompt.vector[j];
        }
        coupled[i] = acc;
    }
    Matrix tokens = z.data;
    for (std::size_t i = 0; i < z.tokens; ++i) {
        for (std::size_t j = 0; j < sizes_.dim; ++j) {
            tokens(i, j) += coupled[j];
        }
    }
    return tokens;
}

double ToyDenoiser::timestep_factor(std::size_t t) const {
    // Multiplicative temperature on the logits; keeps the zero-input map
    // uniform at every timestep while still making maps t-dependent.
    return 0.75 + 0.5 * static_cast<double>(t) / static_cast<double>(sizes_.steps);
}

std::vector<Matrix> ToyDenoiser::attention_logits(const LatentState& z,
                                                  const PromptEmbedding& prompt,
                                                  std::size_t t,
                                                  std::size_t max_layers) const {
    const Matrix tokens = conditioned_tokens(z, prompt);
    const double factor = timestep_factor(t) * default_attention_scale(sizes_.dim);
    const std::size_t count = std::min(max_layers, sizes_.layers);

    std::vector<Matrix> logits;
    logits.reserve(count);
    for (std::size_t l = 0; l < count; ++l) {
        const Matrix q = matmul(tokens, w_q_[l]);
        const Matrix k = matmul(tokens, w_k_[l]);
        Matrix scores = matmul_nt(q, k);
        for (double& v : scores.data()) v *= factor;
        logits.push_back(std::move(scores));
    }
    return logits;
}

std::vector<AttentionMap> ToyDenoiser::attention_probe(const LatentState& z,
                                                       const PromptEmbedding& prompt,
                                                       std::size_t t) const {
    std::vector<AttentionMap> maps;
    maps.reserve(sizes_.layers);
    for (Matrix& scores : attention_logits(z, prompt, t, sizes_.layers)) {
        maps.push_back(softmax_rows(scores));
    }
    return maps;
}

Matrix ToyDenoiser::predict_noise(const LatentState& z, const PromptEmbedding& prompt,
                                  std::size_t t) const {
    const Matrix tokens = conditioned_tokens(z, prompt);
    const std::size_t last = sizes_.layers - 1;
    const double factor = timestep_factor(t) * default_attention_scale(sizes_.dim);

    const Matrix q = matmul(tokens, w_q_[last]);
    const Matrix k = matmul(tokens, w_k_[last]);
    Matrix scores = matmul_nt(q, k);
    for (double& v : scores.data()) v *= factor;
    const AttentionMap attn = softmax_rows(scores);

    const Matrix values = matmul(tokens, w_v_[last]);
    const Matrix mixed = matmul(attn.matrix(), values);
    return matmul(mixed, w_out_);
}

LatentState forward_noise_with(const LatentState& z0, std::size_t t,
                               const NoiseSchedule& sched, const Matrix& eps) {
    if (t < 1 || t > sched.steps()) {
        fail(ErrorCode::invalid_input, "forward noising timestep out of range");
    }
    if (eps.rows() != z0.tokens || eps.cols() != z0.dim) {
        fail(ErrorCode::shape_mismatch, "noise shape does not match latent shape");
    }
    const double ab = sched.alpha_bar(t);
    const double signal = std::sqrt(ab);
    const double noise = std::sqrt(1.0 - ab);

    LatentState out = z0;
    out.t = t;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data.data()[i] = signal * z0.data.data()[i] + noise * eps.data()[i];
    }
    return out;
}

LatentState forward_noise(const LatentState& z0, std::size_t t, const NoiseSchedule& sched,
                          RngStream stream) {
    Matrix eps = random_gaussian(z0.tokens, z0.dim, stream);
    return forward_noise_with(z0, t, sched, eps);
}

Matrix tweedie_estimate(const LatentState& z_t, const Matrix& eps_hat, std::size_t t,
                        const NoiseSchedule& sched) {
    const double ab = sched.alpha_bar(t);
    if (!(ab > 0.0)) {
        fail(ErrorCode::invalid_input, "tweedie estimate undefined for alpha_bar <= 0");
    }
    if (eps_hat.rows() != z_t.tokens || eps_hat.cols() != z_t.dim) {
        fail(ErrorCode::shape_mismatch, "predicted noise shape does not match latent shape");
    }
    const double noise = std::sqrt(1.0 - ab);
    const double inv_signal = 1.0 / std::sqrt(ab);

    Matrix out(z_t.tokens, z_t.dim);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] = (z_t.data.data()[i] - noise * eps_hat.data()[i]) * inv_signal;
    }
    return out;
}

LatentState ddim_step(const LatentState& z_t, const Matrix& eps_hat, std::size_t t,
                      const NoiseSchedule& sched, DdimConvention convention) {
    if (t < 1 || t > sched.steps()) {
        fail(ErrorCode::invalid_input, "ddim timestep out of range");
    }
    const Matrix z0_hat = tweedie_estimate(z_t, eps_hat, t, sched);
    const double signal = convention == DdimConvention::as_written
                              ? std::sqrt(sched.alpha_bar(t))
                              : std::sqrt(sched.alpha_bar(t - 1));
    const double noise = std::sqrt(1.0 - sched.alpha_bar(t - 1));

    LatentState out = z_t;
    out.t = t - 1;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data.data()[i] = signal * z0_hat.data()[i] + noise * eps_hat.data()[i];
    }
    return out;
}

RolloutResult rollout(const ToyDenoiser& denoiser, LatentState z_T,
                      const PromptEmbedding& prompt, const NoiseSchedule& sched,
                      DdimConvention convention) {
    RolloutResult result;
    result.trajectory.seed_id = 0;
    result.trajectory.states.reserve(sched.steps() + 1);

    LatentState state = std::move(z_T);
    state.t = sched.steps();
    result.trajectory.states.push_back(state);
    for (std::size_t t = sched.steps(); t >= 1; --t) {
        const Matrix eps_hat = denoiser.predict_noise(state, prompt, t);
        state = ddim_step(state, eps_hat, t, sched, convention);
        result.trajectory.states.push_back(state);
    }
    result.final_state = state;
    return result;
}

}  // namespace bansa
