#include "pipeline.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "acquisition.hpp"
#include "errors.hpp"
#include "report.hpp"
#include "tensor_io.hpp"

namespace bansa {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void log_stage(const char* stage) {
    if (verbose_enabled()) {
        std::cerr << "[bansa] " << stage << "\n";
    }
}

}  // namespace

bool verbose_enabled() {
    const char* v = std::getenv("BANSA_VERBOSE");
    return v != nullptr && v[0] != '\0' && v[0] != '0';
}

ToyDenoiser make_denoiser(const RunConfig& config) {
    return ToyDenoiser(config.model_seed,
                       DenoiserSizes{config.dim, config.layers, config.steps},
                       config.layer_variation);
}

NoiseSchedule make_schedule(const RunConfig& config) {
    return NoiseSchedule::linear(config.steps);
}

ScoreOptions score_options(const RunConfig& config) {
    ScoreOptions options;
    options.k = config.k;
    options.drop_prob = config.drop_prob;
    options.depth = config.depth;
    options.probe_timestep = config.probe_timestep;
    options.probe_window = config.probe_window;
    options.acquisition = config.acquisition;
    options.jitter_scale = config.jitter_scale;
    options.stochastic_seed = config.base_seed;
    options.ddim_convention = config.ddim_convention;
    return options;
}

PoolScores replay_scores(const RunConfig& config) {
    const ToyDenoiser denoiser = make_denoiser(config);
    const NoiseSchedule sched = make_schedule(config);
    const PromptEmbedding prompt = make_prompt(config.prompt_seed, 0, config.dim);
    const auto pool = build_pool(config.m, config.base_seed, config.tokens, config.dim);
    return score_pool(pool, denoiser, prompt, sched, score_options(config));
}

PipelineResult run_pipeline(const RunConfig& config) {
    PipelineResult result;
    result.config = config;

    log_stage("building model and pool");
    auto start = Clock::now();
    const ToyDenoiser denoiser = make_denoiser(config);
    const NoiseSchedule sched = make_schedule(config);
    const PromptEmbedding prompt = make_prompt(config.prompt_seed, 0, config.dim);
    result.pool = build_pool(config.m, config.base_seed, config.tokens, config.dim);
    result.timings.build_ms = elapsed_ms(start);

    log_stage("scoring pool");
    start = Clock::now();
    PoolScores scores = score_pool(result.pool, denoiser, prompt, sched, score_options(config));
    result.table = std::move(scores.table);
    result.truncated_scores = std::move(scores.truncated);
    for (std::size_t i = 0; i < result.pool.size(); ++i) {
        result.pool[i].score = result.truncated_scores[i];
    }
    result.timings.score_ms = elapsed_ms(start);

    log_stage("selecting seed");
    start = Clock::now();
    result.chosen_index = select(result.truncated_scores, config.criterion);
    result.timings.select_ms = elapsed_ms(start);

    log_stage("rolling out chosen seed");
    start = Clock::now();
    LatentState z_T = result.pool[result.chosen_index].latent;
    RolloutResult rolled = rollout(denoiser, std::move(z_T), prompt, sched,
                                   config.ddim_convention);
    rolled.trajectory.seed_id = result.pool[result.chosen_index].seed_id;
    result.final_latent = std::move(rolled.final_state);
    result.trajectory = std::move(rolled.trajectory);
    result.timings.rollout_ms = elapsed_ms(start);
    return result;
}

namespace {

Tensor latent_to_tensor(const LatentState& state) {
    Tensor t;
    t.dims = {state.tokens, state.dim};
    t.values = state.data.data();
    return t;
}

Tensor trajectory_to_tensor(const TrajectoryRecord& trajectory) {
    const auto& first = trajectory.states.front();
    Tensor t;
    t.dims = {trajectory.states.size(), first.tokens, first.dim};
    t.values.reserve(trajectory.states.size() * first.tokens * first.dim);
    for (const auto& state : trajectory.states) {
        t.values.insert(t.values.end(), state.data.data().begin(), state.data.data().end());
    }
    return t;
}

}  // namespace

std::filesystem::path write_selection_outputs(const PipelineResult& result,
                                              const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        fail(ErrorCode::io_failure, "cannot create output directory: " + out_dir.string());
    }

    const std::string latent_file = "final_latent.atns";
    write_tensor(out_dir / latent_file, latent_to_tensor(result.final_latent));

    std::optional<std::string> trajectory_file;
    if (result.config.save_trajectory) {
        trajectory_file = "trajectory.atns";
        write_tensor(out_dir / *trajectory_file, trajectory_to_tensor(result.trajectory));
    }

    const nlohmann::json report = build_selection_report(result, latent_file, trajectory_file);
    const std::filesystem::path report_path = out_dir / "report.json";
    std::ofstream out(report_path);
    if (!out) {
        fail(ErrorCode::io_failure, "cannot open for writing: " + report_path.string());
    }
    out << report.dump(2) << "\n";
    if (!out) {
        fail(ErrorCode::io_failure, "write failed: " + report_path.string());
    }
    return report_path;
}

ProbeResult run_layer_probe(const RunConfig& config) {
    if (config.m < 2) {
        fail(ErrorCode::insufficient_pool, "layer probing needs a pool of at least 2 seeds");
    }
    const ToyDenoiser denoiser = make_denoiser(config);
    const NoiseSchedule sched = make_schedule(config);
    const auto pool = build_pool(config.m, config.base_seed, config.tokens, config.dim);

    ScoreOptions options = score_options(config);
    options.depth = config.layers;  // probing always looks at every layer

    std::vector<std::vector<double>> rows;
    std::vector<std::uint64_t> ids;
    for (std::size_t p = 0; p < config.probe_prompts; ++p) {
        const PromptEmbedding prompt = make_prompt(config.prompt_seed, p, config.dim);
        const PoolScores scores = score_pool(pool, denoiser, prompt, sched, options);
        if (config.average_seeds) {
            std::vector<double> averaged(config.layers, 0.0);
            for (std::size_t i = 0; i < config.m; ++i) {
                for (std::size_t l = 0; l < config.layers; ++l) {
                    averaged[l] += scores.table.at(i, l);
                }
            }
            for (double& v : averaged) v /= static_cast<double>(config.m);
            rows.push_back(std::move(averaged));
            ids.push_back(p);
        } else {
            for (std::size_t i = 0; i < config.m; ++i) {
                std::vector<double> row(config.layers);
                for (std::size_t l = 0; l < config.layers; ++l) {
                    row[l] = scores.table.at(i, l);
                }
                rows.push_back(std::move(row));
                ids.push_back(p * config.m + i);
            }
        }
    }

    ProbeResult result;
    result.config = config;
    result.rows = rows.size();
    result.table = ScoreTable::from_rows(std::move(rows), std::move(ids));
    result.profile = select_depth(result.table, config.tau);
    return result;
}

namespace {

enum class FileKind { attention, trajectory };

struct LoadedGroup {
    FileKind kind;
    std::vector<AttentionMap> maps;
    std::vector<TrajectoryRecord> trajectories;
};

LoadedGroup load_group(const std::vector<std::filesystem::path>& files) {
    LoadedGroup group{FileKind::attention, {}, {}};
    bool first = true;
    for (const auto& path : files) {
        const Tensor tensor = read_tensor(path);
        FileKind kind;
        if (tensor.rank() == 2) {
            kind = FileKind::attention;
        } else if (tensor.rank() == 3) {
            kind = FileKind::trajectory;
        } else {
            fail(ErrorCode::invalid_input,
                 "expected a rank-2 map or rank-3 trajectory: " + path.string());
        }
        if (first) {
            group.kind = kind;
            first = false;
        } else if (kind != group.kind) {
            fail(ErrorCode::invalid_input,
                 "cannot mix attention maps and trajectories in one run: " + path.string());
        }
        if (kind == FileKind::attention) {
            group.maps.push_back(AttentionMap::validated(
                Matrix::from_data(tensor.dims[0], tensor.dims[1], tensor.values)));
        } else {
            TrajectoryRecord trajectory;
            const std::size_t steps = tensor.dims[0];
            const std::size_t tokens = tensor.dims[1];
            const std::size_t dim = tensor.dims[2];
            if (steps < 2) {
                fail(ErrorCode::invalid_input, "trajectory needs at least 2 states: " + path.string());
            }
            for (std::size_t s = 0; s < steps; ++s) {
                LatentState state;
                state.tokens = tokens;
                state.dim = dim;
                state.t = steps - 1 - s;
                std::vector<double> slice(tensor.values.begin() + s * tokens * dim,
                                          tensor.values.begin() + (s + 1) * tokens * dim);
                state.data = Matrix::from_data(tokens, dim, std::move(slice));
                trajectory.states.push_back(std::move(state));
            }
            group.trajectories.push_back(std::move(trajectory));
        }
    }
    return group;
}

GroupMetrics group_metrics(const LoadedGroup& group, double cutoff) {
    GroupMetrics metrics;
    if (group.kind == FileKind::attention) {
        metrics.kind = "attention";
        metrics.count = group.maps.size();
        if (group.maps.size() >= 2) {
            metrics.intra_distance = pairwise_attention_distance(group.maps);
        }
    } else {
        metrics.kind = "trajectory";
        metrics.count = group.trajectories.size();
        if (group.trajectories.size() >= 2) {
            metrics.intra_distance = pairwise_trajectory_distance(group.trajectories);
        }
        for (const auto& trajectory : group.trajectories) {
            metrics.mean_variation += trajectory_variation(trajectory, cutoff);
            metrics.mean_frame_variance += intra_frame_variance(trajectory.states.back());
        }
        metrics.mean_variation /= static_cast<double>(group.trajectories.size());
        metrics.mean_frame_variance /= static_cast<double>(group.trajectories.size());
    }
    return metrics;
}

double cross_group_distance(const LoadedGroup& a, const LoadedGroup& b) {
    double total = 0.0;
    std::size_t pairs = 0;
    if (a.kind == FileKind::attention) {
        for (const auto& ma : a.maps) {
            for (const auto& mb : b.maps) {
                total += pairwise_attention_distance(std::array{ma, mb});
                pairs += 1;
            }
        }
    } else {
        for (const auto& ta : a.trajectories) {
            for (const auto& tb : b.trajectories) {
                total += trajectory_distance(ta, tb);
                pairs += 1;
            }
        }
    }
    return total / static_cast<double>(pairs);
}

}  // namespace

AnalysisResult analyze_files(const std::vector<std::filesystem::path>& group_a,
                             const std::vector<std::filesystem::path>& group_b,
                             double cutoff) {
    if (group_a.empty()) {
        fail(ErrorCode::invalid_input, "analysis needs at least one input file");
    }
    AnalysisResult result;
    result.cutoff = cutoff;
    const LoadedGroup a = load_group(group_a);
    result.groups.push_back(group_metrics(a, cutoff));
    if (!group_b.empty()) {
        const LoadedGroup b = load_group(group_b);
        if (b.kind != a.kind) {
            fail(ErrorCode::invalid_input, "groups must hold the same kind of tensor");
        }
        result.groups.push_back(group_metrics(b, cutoff));
        result.cross_distance = cross_group_distance(a, b);
    }
    return result;
}

ReportAnalysis analyze_report(const std::filesystem::path& report_path) {
    std::ifstream in(report_path);
    if (!in) {
        fail(ErrorCode::io_failure, "cannot open report: " + report_path.string());
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorCode::io_failure, "report is not valid JSON: " + std::string(e.what()));
    }
    if (!doc.contains("payload") || !doc["payload"].contains("config")) {
        fail(ErrorCode::invalid_input, "report lacks an embedded config");
    }
    const RunConfig config = parse_config(doc["payload"]["config"]);

    const ToyDenoiser denoiser = make_denoiser(config);
    const NoiseSchedule sched = make_schedule(config);
    const PromptEmbedding prompt = make_prompt(config.prompt_seed, 0, config.dim);
    const auto pool = build_pool(config.m, config.base_seed, config.tokens, config.dim);
    const PoolScores scores = score_pool(pool, denoiser, prompt, sched, score_options(config));

    ReportAnalysis analysis;
    analysis.config = config;
    const std::size_t low = select(scores.truncated, SelectionCriterion::argmin);
    const std::size_t high = select(scores.truncated, SelectionCriterion::argmax);
    analysis.low_seed = pool[low].seed_id;
    analysis.high_seed = pool[high].seed_id;

    // Dispersion of fresh masked samples of each extreme seed's first-layer
    // attention at the probe step.
    auto masked_samples = [&](const SeedCandidate& seed) {
        LatentState state = seed.latent;
        state.t = sched.steps();
        const auto maps = denoiser.attention_probe(state, prompt, config.probe_timestep);
        const RngStream stream = make_stream(config.base_seed, "analysis", seed.seed_id);
        return make_ensemble(maps.front(), config.k, config.drop_prob, stream).samples;
    };
    const auto low_samples = masked_samples(pool[low]);
    const auto high_samples = masked_samples(pool[high]);
    analysis.attention = group_summary(low_samples, high_samples);

    auto rolled_metrics = [&](const SeedCandidate& seed, double& variation, double& variance) {
        RolloutResult rolled = rollout(denoiser, seed.latent, prompt, sched,
                                       config.ddim_convention);
        variation = trajectory_variation(rolled.trajectory, config.analysis_cutoff);
        variance = intra_frame_variance(rolled.final_state);
    };
    rolled_metrics(pool[low], analysis.low_variation, analysis.low_frame_variance);
    rolled_metrics(pool[high], analysis.high_variation, analysis.high_frame_variance);
    return analysis;
}

}  // namespace bansa
