#include "config.hpp"

#include <fstream>
#include <set>
#include <vector>

#include "errors.hpp"

namespace bansa {

using nlohmann::json;

std::string_view to_string(SelectionCriterion c) {
    return c == SelectionCriterion::argmin ? "argmin" : "argmax";
}

std::string_view to_string(AcquisitionKind a) {
    switch (a) {
        case AcquisitionKind::bansa_b: return "bansa_b";
        case AcquisitionKind::bansa_d: return "bansa_d";
        case AcquisitionKind::entropy: return "entropy";
        case AcquisitionKind::random: return "random";
    }
    return "unknown";
}

std::string_view to_string(DdimConvention c) {
    return c == DdimConvention::as_written ? "as_written" : "standard";
}

namespace {

const std::set<std::string> kKnownKeys = {
    "m", "k", "p", "tau", "model_seed", "base_seed", "prompt_seed", "sizes",
    "probe_timestep", "probe_window", "depth", "criterion", "acquisition",
    "jitter_scale", "layer_variation", "ddim_convention", "probe_prompts",
    "average_seeds", "save_trajectory", "analysis_cutoff",
};
const std::set<std::string> kKnownSizeKeys = {"tokens", "dim", "layers", "steps"};

class Violations {
public:
    void add(const std::string& message) { messages_.push_back(message); }
    bool empty() const { return messages_.empty(); }
    [[noreturn]] void raise() const {
        std::string joined = "invalid config:";
        for (const auto& m : messages_) {
            joined += "\n  - " + m;
        }
        fail(ErrorCode::bad_config, joined);
    }

private:
    std::vector<std::string> messages_;
};

template <typename T>
bool read_number(const json& doc, const std::string& key, T& out, Violations& violations,
                 bool integer) {
    if (!doc.contains(key)) return false;
    const auto& v = doc.at(key);
    if (integer ? !v.is_number_integer() : !v.is_number()) {
        violations.add(key + ": expected a " + (integer ? "whole number" : "number"));
        return false;
    }
    out = v.get<T>();
    return true;
}

}  // namespace

RunConfig parse_config(const json& doc) {
    Violations violations;
    if (!doc.is_object()) {
        violations.add("config root must be an object");
        violations.raise();
    }
    for (const auto& [key, value] : doc.items()) {
        if (!kKnownKeys.contains(key)) {
            violations.add("unknown key: " + key);
        }
    }

    RunConfig config;
    read_number(doc, "m", config.m, violations, true);
    read_number(doc, "k", config.k, violations, true);
    read_number(doc, "p", config.drop_prob, violations, false);
    read_number(doc, "tau", config.tau, violations, false);
    read_number(doc, "model_seed", config.model_seed, violations, true);
    read_number(doc, "base_seed", config.base_seed, violations, true);
    read_number(doc, "prompt_seed", config.prompt_seed, violations, true);
    read_number(doc, "probe_window", config.probe_window, violations, true);
    read_number(doc, "jitter_scale", config.jitter_scale, violations, false);
    read_number(doc, "layer_variation", config.layer_variation, violations, false);
    read_number(doc, "probe_prompts", config.probe_prompts, violations, true);
    read_number(doc, "analysis_cutoff", config.analysis_cutoff, violations, false);

    if (doc.contains("sizes")) {
        const auto& sizes = doc.at("sizes");
        if (!sizes.is_object()) {
            violations.add("sizes: expected an object");
        } else {
            for (const auto& [key, value] : sizes.items()) {
                if (!kKnownSizeKeys.contains(key)) {
                    violations.add("unknown key: sizes." + key);
                }
            }
            read_number(sizes, "tokens", config.tokens, violations, true);
            read_number(sizes, "dim", config.dim, violations, true);
            read_number(sizes, "layers", config.layers, violations, true);
            read_number(sizes, "steps", config.steps, violations, true);
        }
    }

    // Derived defaults follow the configured sizes unless set explicitly.
    config.probe_timestep = config.steps;
    config.depth = config.layers;
    read_number(doc, "probe_timestep", config.probe_timestep, violations, true);
    read_number(doc, "depth", config.depth, violations, true);

    if (doc.contains("criterion")) {
        const std::string v = doc.at("criterion").is_string()
                                  ? doc.at("criterion").get<std::string>()
                                  : std::string();
        if (v == "argmin") {
            config.criterion = SelectionCriterion::argmin;
        } else if (v == "argmax") {
            config.criterion = SelectionCriterion::argmax;
        } else {
            violations.add("criterion: expected \"argmin\" or \"argmax\"");
        }
    }
    if (doc.contains("acquisition")) {
        const std::string v = doc.at("acquisition").is_string()
                                  ? doc.at("acquisition").get<std::string>()
                                  : std::string();
        if (v == "bansa_b") {
            config.acquisition = AcquisitionKind::bansa_b;
        } else if (v == "bansa_d") {
            config.acquisition = AcquisitionKind::bansa_d;
        } else if (v == "entropy") {
            config.acquisition = AcquisitionKind::entropy;
        } else if (v == "random") {
            config.acquisition = AcquisitionKind::random;
        } else {
            violations.add("acquisition: expected bansa_b, bansa_d, entropy or random");
        }
    }
    if (doc.contains("ddim_convention")) {
        const std::string v = doc.at("ddim_convention").is_string()
                                  ? doc.at("ddim_convention").get<std::string>()
                                  : std::string();
        if (v == "as_written") {
            config.ddim_convention = DdimConvention::as_written;
        } else if (v == "standard") {
            config.ddim_convention = DdimConvention::standard;
        } else {
            violations.add("ddim_convention: expected \"as_written\" or \"standard\"");
        }
    }
    if (doc.contains("average_seeds")) {
        if (!doc.at("average_seeds").is_boolean()) {
            violations.add("average_seeds: expected a boolean");
        } else {
            config.average_seeds = doc.at("average_seeds").get<bool>();
        }
    }
    if (doc.contains("save_trajectory")) {
        if (!doc.at("save_trajectory").is_boolean()) {
            violations.add("save_trajectory: expected a boolean");
        } else {
            config.save_trajectory = doc.at("save_trajectory").get<bool>();
        }
    }

    if (config.m < 1) violations.add("m: pool size must be at least 1");
    if (config.k < 1) violations.add("k: ensemble size must be at least 1");
    if (!(config.drop_prob >= 0.0 && config.drop_prob <= 1.0)) {
        violations.add("p: drop probability must lie in [0,1]");
    }
    if (!(config.tau >= -1.0 && config.tau <= 1.0)) {
        violations.add("tau: correlation threshold must lie in [-1,1]");
    }
    if (config.tokens < 1) violations.add("sizes.tokens: must be at least 1");
    if (config.dim < 1) violations.add("sizes.dim: must be at least 1");
    if (config.layers < 1) violations.add("sizes.layers: must be at least 1");
    if (config.steps < 1) violations.add("sizes.steps: must be at least 1");
    if (config.probe_timestep < 1 || config.probe_timestep > config.steps) {
        violations.add("probe_timestep: must lie in [1, sizes.steps]");
    }
    if (config.probe_window < 1 || config.probe_window > config.probe_timestep) {
        violations.add("probe_window: must lie in [1, probe_timestep]");
    }
    if (config.depth < 1 || config.depth > config.layers) {
        violations.add("depth: must lie in [1, sizes.layers]");
    }
    if (!(config.jitter_scale >= 0.0)) {
        violations.add("jitter_scale: must be nonnegative");
    }
    if (!(config.layer_variation >= 0.0)) {
        violations.add("layer_variation: must be nonnegative");
    }
    if (config.probe_prompts < 1) violations.add("probe_prompts: must be at least 1");
    if (!(config.analysis_cutoff > 0.0 && config.analysis_cutoff < 0.5)) {
        violations.add("analysis_cutoff: must lie in (0, 0.5)");
    }

    if (!violations.empty()) {
        violations.raise();
    }
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::io_failure, "cannot open config file: " + path.string());
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        fail(ErrorCode::bad_config, "config is not valid JSON: " + std::string(e.what()));
    }
    return parse_config(doc);
}

json config_to_json(const RunConfig& config) {
    json doc;
    doc["m"] = config.m;
    doc["k"] = config.k;
    doc["p"] = config.drop_prob;
    doc["tau"] = config.tau;
    doc["model_seed"] = config.model_seed;
    doc["base_seed"] = config.base_seed;
    doc["prompt_seed"] = config.prompt_seed;
    doc["sizes"] = {{"tokens", config.tokens},
                    {"dim", config.dim},
                    {"layers", config.layers},
                    {"steps", config.steps}};
    doc["probe_timestep"] = config.probe_timestep;
    doc["probe_window"] = config.probe_window;
    doc["depth"] = config.depth;
    doc["criterion"] = std::string(to_string(config.criterion));
    doc["acquisition"] = std::string(to_string(config.acquisition));
    doc["jitter_scale"] = config.jitter_scale;
    doc["layer_variation"] = config.layer_variation;
    doc["ddim_convention"] = std::string(to_string(config.ddim_convention));
    doc["probe_prompts"] = config.probe_prompts;
    doc["average_seeds"] = config.average_seeds;
    doc["save_trajectory"] = config.save_trajectory;
    doc["analysis_cutoff"] = config.analysis_cutoff;
    return doc;
}

}  // namespace bansa
