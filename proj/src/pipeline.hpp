#pragma once

#include <filesystem>
#include <string>

#include "analysis.hpp"
#include "selector.hpp"

namespace bansa {

struct StageTimings {
    double build_ms = 0.0;
    double score_ms = 0.0;
    double select_ms = 0.0;
    double rollout_ms = 0.0;
};

struct PipelineResult {
    RunConfig config;
    std::vector<SeedCandidate> pool;  // scores filled in
    ScoreTable table;
    std::vector<double> truncated_scores;
    std::size_t chosen_index = 0;
    LatentState final_latent;
    TrajectoryRecord trajectory;
    StageTimings timings;
};

ToyDenoiser make_denoiser(const RunConfig& config);
NoiseSchedule make_schedule(const RunConfig& config);
ScoreOptions score_options(const RunConfig& config);

// Scoring stage alone: pool + denoiser + prompt from the config, then
// score_pool. Replaying a config reproduces the same scores bit for bit.
PoolScores replay_scores(const RunConfig& config);

// Full run: build pool, score, select, roll the chosen seed out to t=0.
PipelineResult run_pipeline(const RunConfig& config);

// Writes report.json plus final_latent.atns (and trajectory.atns when
// configured) into out_dir; returns the report path.
std::filesystem::path write_selection_outputs(const PipelineResult& result,
                                              const std::filesystem::path& out_dir);

struct ProbeResult {
    RunConfig config;
    std::size_t rows = 0;  // prompts x seeds, or prompts when seed-averaged
    ScoreTable table;
    LayerProfile profile;
};

// Offline depth calibration: per-layer scores over probe_prompts prompts and
// the configured pool, correlated across the pooled rows (or across prompts
// after averaging over seeds when average_seeds is set).
ProbeResult run_layer_probe(const RunConfig& config);

struct GroupMetrics {
    std::string kind;  // "attention" or "trajectory"
    std::size_t count = 0;
    double intra_distance = 0.0;          // mean pairwise within the group
    double mean_variation = 0.0;          // trajectories only
    double mean_frame_variance = 0.0;     // trajectories only
};

struct AnalysisResult {
    std::vector<GroupMetrics> groups;  // one or two entries
    double cross_distance = 0.0;       // two-group runs only
    double cutoff = 0.25;
};

// Direct metric computation over tensor files: rank-2 files are attention
// maps, rank-3 files are trajectories (steps x tokens x dim). All files of
// one invocation must agree in kind and shape.
AnalysisResult analyze_files(const std::vector<std::filesystem::path>& group_a,
                             const std::vector<std::filesystem::path>& group_b,
                             double cutoff);

struct ReportAnalysis {
    RunConfig config;
    std::uint64_t low_seed = 0;
    std::uint64_t high_seed = 0;
    GroupDistanceSummary attention;  // masked-sample dispersion per group
    double low_variation = 0.0;
    double high_variation = 0.0;
    double low_frame_variance = 0.0;
    double high_frame_variance = 0.0;
};

// Re-scores the pool of a finished run, then compares its extreme seeds:
// dispersion of masked attention samples, filtered trajectory variation and
// intra-frame variance of the rolled-out latents.
ReportAnalysis analyze_report(const std::filesystem::path& report_path);

bool verbose_enabled();

}  // namespace bansa
