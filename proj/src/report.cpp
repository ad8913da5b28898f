#include "report.hpp"

#include <charconv>
#include <cmath>

#include "errors.hpp"

namespace bansa {

using nlohmann::json;

namespace {

json curve_value(double v) {
    // JSON has no NaN literal; skipped (degenerate) depths serialize as null.
    if (std::isnan(v)) return nullptr;
    return v;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

}  // namespace

json build_selection_report(const PipelineResult& result, const std::string& latent_file,
                            const std::optional<std::string>& trajectory_file) {
    const RunConfig& config = result.config;
    json payload;
    payload["config"] = config_to_json(config);

    json pool = json::array();
    for (std::size_t i = 0; i < result.pool.size(); ++i) {
        json seed;
        seed["seed_id"] = result.pool[i].seed_id;
        seed["rng_seed"] = result.pool[i].rng_seed;
        json per_layer = json::array();
        for (std::size_t l = 0; l < result.table.layers(); ++l) {
            per_layer.push_back(result.table.at(i, l));
        }
        seed["per_layer"] = std::move(per_layer);
        seed["score"] = result.truncated_scores[i];
        pool.push_back(std::move(seed));
    }
    payload["pool"] = std::move(pool);

    json selection;
    selection["chosen_seed_id"] = result.pool[result.chosen_index].seed_id;
    selection["score"] = result.truncated_scores[result.chosen_index];
    selection["criterion"] = std::string(to_string(config.criterion));
    selection["reversed"] = config.criterion == SelectionCriterion::argmax;
    selection["forced"] = config.m == 1;
    selection["depth"] = config.depth;  // 1-based layer count
    payload["selection"] = std::move(selection);

    json outputs;
    outputs["final_latent"] = latent_file;
    if (trajectory_file) {
        outputs["trajectory"] = *trajectory_file;
    }
    payload["outputs"] = std::move(outputs);

    json report;
    report["schema_version"] = kReportSchemaVersion;
    report["kind"] = "selection_report";
    report["payload"] = std::move(payload);
    report["timings_ms"] = {{"build", result.timings.build_ms},
                            {"score", result.timings.score_ms},
                            {"select", result.timings.select_ms},
                            {"rollout", result.timings.rollout_ms}};
    return report;
}

json build_probe_report(const ProbeResult& result) {
    json payload;
    payload["config"] = config_to_json(result.config);
    payload["rows"] = result.rows;

    json profile;
    profile["per_layer"] = result.profile.per_layer;
    profile["cumulative"] = result.profile.cumulative;
    json curve = json::array();
    for (double v : result.profile.corr_curve) {
        curve.push_back(curve_value(v));
    }
    profile["corr_curve"] = std::move(curve);
    profile["d_star"] = result.profile.d_star + 1;  // 1-based in reports
    profile["tau"] = result.profile.tau;
    payload["layer_profile"] = std::move(profile);

    json report;
    report["schema_version"] = kReportSchemaVersion;
    report["kind"] = "layer_probe_report";
    report["payload"] = std::move(payload);
    report["timings_ms"] = json::object();
    return report;
}

std::string probe_curve_tsv(const LayerProfile& profile) {
    std::string out = "depth\tcorrelation\n";
    for (std::size_t d = 0; d < profile.corr_curve.size(); ++d) {
        out += std::to_string(d + 1);
        out += '\t';
        out += format_double(profile.corr_curve[d]);
        out += '\n';
    }
    return out;
}

json build_score_record(std::size_t rows, std::size_t cols, std::size_t k, double drop_prob,
                        std::uint64_t stream_seed, const AcquisitionScore& score) {
    json payload;
    payload["input"] = {{"rows", rows}, {"cols", cols}};
    payload["k"] = k;
    payload["p"] = drop_prob;
    payload["stream_seed"] = stream_seed;
    payload["score"] = score.value;
    payload["score_kind"] = std::string(to_string(score.kind));

    json report;
    report["schema_version"] = kReportSchemaVersion;
    report["kind"] = "score_record";
    report["payload"] = std::move(payload);
    return report;
}

json build_analysis_report(const AnalysisResult& result) {
    json payload;
    payload["cutoff"] = result.cutoff;
    json groups = json::array();
    for (const auto& g : result.groups) {
        json group;
        group["kind"] = g.kind;
        group["count"] = g.count;
        group["intra_distance"] = g.intra_distance;
        if (g.kind == "trajectory") {
            group["trajectory_variation"] = g.mean_variation;
            group["intra_frame_variance"] = g.mean_frame_variance;
        }
        groups.push_back(std::move(group));
    }
    payload["groups"] = std::move(groups);
    if (result.groups.size() == 2) {
        payload["cross_distance"] = result.cross_distance;
    }

    json report;
    report["schema_version"] = kReportSchemaVersion;
    report["kind"] = "analysis_report";
    report["payload"] = std::move(payload);
    return report;
}

json build_report_analysis(const ReportAnalysis& analysis) {
    json payload;
    payload["config"] = config_to_json(analysis.config);
    payload["low_seed"] = analysis.low_seed;
    payload["high_seed"] = analysis.high_seed;
    payload["attention"] = {{"intra_low", analysis.attention.intra_low},
                            {"intra_high", analysis.attention.intra_high},
                            {"cross", analysis.attention.cross}};
    payload["trajectory"] = {{"low_variation", analysis.low_variation},
                             {"high_variation", analysis.high_variation},
                             {"low_frame_variance", analysis.low_frame_variance},
                             {"high_frame_variance", analysis.high_frame_variance}};

    json report;
    report["schema_version"] = kReportSchemaVersion;
    report["kind"] = "analysis_report";
    report["payload"] = std::move(payload);
    return report;
}

std::string payload_bytes(const nlohmann::json& report) {
    if (!report.contains("payload")) {
        fail(ErrorCode::invalid_input, "report has no payload section");
    }
    return report.at("payload").dump(2);
}

void require_schema(const nlohmann::json& report) {
    if (!report.is_object() || !report.contains("schema_version")) {
        fail(ErrorCode::invalid_input, "document lacks schema_version");
    }
    const auto& v = report.at("schema_version");
    if (!v.is_number_integer() || v.get<int>() != kReportSchemaVersion) {
        fail(ErrorCode::invalid_input, "unsupported report schema version");
    }
}

}  // namespace bansa
