#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "toy_diffusion.hpp"

namespace bansa {

enum class SelectionCriterion { argmin, argmax };
enum class AcquisitionKind { bansa_b, bansa_d, entropy, random };

std::string_view to_string(SelectionCriterion c);
std::string_view to_string(AcquisitionKind a);
std::string_view to_string(DdimConvention c);

// Run configuration with the published defaults: pool of 10 seeds, 10
// stochastic passes, drop probability 0.2, correlation threshold 0.7, 50
// denoising steps. `depth` is the number of layers used for selection
// (1-based count); by default all layers count.
struct RunConfig {
    std::size_t m = 10;
    std::size_t k = 10;
    double drop_prob = 0.2;
    double tau = 0.7;

    std::uint64_t model_seed = 1;
    std::uint64_t base_seed = 42;
    std::uint64_t prompt_seed = 0;

    std::size_t tokens = 16;
    std::size_t dim = 8;
    std::size_t layers = 8;
    std::size_t steps = 50;

    std::size_t probe_timestep = 50;  // defaults to steps (first denoising step)
    std::size_t probe_window = 1;     // >1 averages scores over a window of steps

    std::size_t depth = 8;  // defaults to layers (no truncation)
    SelectionCriterion criterion = SelectionCriterion::argmin;
    AcquisitionKind acquisition = AcquisitionKind::bansa_b;
    double jitter_scale = 0.1;
    double layer_variation = 0.1;
    DdimConvention ddim_convention = DdimConvention::as_written;

    std::size_t probe_prompts = 100;  // probe-layers mode only
    bool average_seeds = false;       // probe-layers: average over seeds per prompt
    bool save_trajectory = false;
    double analysis_cutoff = 0.25;
};

// Parses and validates; every violated field is listed in one error message.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

// Complete echo; parse_config(config_to_json(c)) reproduces c.
nlohmann::json config_to_json(const RunConfig& config);

}  // namespace bansa
