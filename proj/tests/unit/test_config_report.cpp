#include <doctest.h>

#include <string>

#include "errors.hpp"
#include "pipeline.hpp"
#include "report.hpp"

using namespace bansa;
using nlohmann::json;

TEST_CASE("defaults match the published setting") {
    const RunConfig config = parse_config(json::object());
    CHECK(config.m == 10);
    CHECK(config.k == 10);
    CHECK(config.drop_prob == 0.2);
    CHECK(config.tau == 0.7);
    CHECK(config.steps == 50);
    CHECK(config.probe_timestep == 50);
    CHECK(config.depth == config.layers);
    CHECK(config.criterion == SelectionCriterion::argmin);
    CHECK(config.acquisition == AcquisitionKind::bansa_b);
}

TEST_CASE("derived defaults follow configured sizes") {
    const RunConfig config = parse_config(json::parse(
        R"({"sizes": {"tokens": 8, "dim": 4, "layers": 5, "steps": 20}})"));
    CHECK(config.probe_timestep == 20);
    CHECK(config.depth == 5);
}

TEST_CASE("validation enumerates every violated field") {
    const json bad = json::parse(R"({
        "m": 0,
        "p": 1.5,
        "tau": 3.0,
        "criterion": "sideways",
        "mystery": 1,
        "sizes": {"tokens": 0, "bogus": 2}
    })");
    try {
        parse_config(bad);
        FAIL("expected a config error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::bad_config);
        const std::string msg = e.what();
        CHECK(msg.find("m:") != std::string::npos);
        CHECK(msg.find("p:") != std::string::npos);
        CHECK(msg.find("tau:") != std::string::npos);
        CHECK(msg.find("criterion") != std::string::npos);
        CHECK(msg.find("unknown key: mystery") != std::string::npos);
        CHECK(msg.find("sizes.tokens") != std::string::npos);
        CHECK(msg.find("unknown key: sizes.bogus") != std::string::npos);
    }
}

TEST_CASE("config round-trips through its echo") {
    json doc = json::parse(R"({
        "m": 4, "k": 3, "p": 0.5, "tau": 0.9,
        "base_seed": 99, "model_seed": 5, "prompt_seed": 7,
        "sizes": {"tokens": 12, "dim": 6, "layers": 4, "steps": 25},
        "probe_timestep": 20, "probe_window": 2, "depth": 3,
        "criterion": "argmax", "acquisition": "entropy",
        "jitter_scale": 0.3, "layer_variation": 0.1,
        "ddim_convention": "standard", "probe_prompts": 9,
        "average_seeds": true, "save_trajectory": true, "analysis_cutoff": 0.3
    })");
    const RunConfig config = parse_config(doc);
    const RunConfig replayed = parse_config(config_to_json(config));
    CHECK(config_to_json(config) == config_to_json(replayed));
    CHECK(replayed.criterion == SelectionCriterion::argmax);
    CHECK(replayed.acquisition == AcquisitionKind::entropy);
    CHECK(replayed.ddim_convention == DdimConvention::standard);
    CHECK(replayed.probe_window == 2);
    CHECK(replayed.average_seeds);
}

TEST_CASE("range violations are caught") {
    CHECK_THROWS_AS(parse_config(json::parse(R"({"probe_timestep": 99})")), Error);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"depth": 9})")), Error);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"probe_window": 0})")), Error);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"analysis_cutoff": 0.5})")), Error);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"k": 0})")), Error);
}

TEST_CASE("selection report carries pool, selection and flags") {
    RunConfig config;
    config.m = 3;
    const PipelineResult result = run_pipeline(config);
    const json report = build_selection_report(result, "final_latent.atns", std::nullopt);
    require_schema(report);
    CHECK(report["kind"] == "selection_report");
    CHECK(report["payload"]["pool"].size() == 3);
    CHECK(report["payload"]["selection"]["reversed"] == false);
    CHECK(report["payload"]["selection"]["forced"] == false);
    CHECK(report["payload"]["outputs"]["final_latent"] == "final_latent.atns");
    CHECK(report.contains("timings_ms"));
    // timings live outside the deterministic payload
    CHECK(!report["payload"].contains("timings_ms"));
}

TEST_CASE("forced and reversed flags are reported") {
    RunConfig config;
    config.m = 1;
    const PipelineResult forced = run_pipeline(config);
    const json forced_report = build_selection_report(forced, "x.atns", std::nullopt);
    CHECK(forced_report["payload"]["selection"]["forced"] == true);

    config.m = 3;
    config.criterion = SelectionCriterion::argmax;
    const PipelineResult reversed = run_pipeline(config);
    const json reversed_report = build_selection_report(reversed, "x.atns", std::nullopt);
    CHECK(reversed_report["payload"]["selection"]["reversed"] == true);
}

TEST_CASE("payloads are byte-identical across reruns") {
    RunConfig config;
    config.m = 4;
    const json a = build_selection_report(run_pipeline(config), "f.atns", std::nullopt);
    const json b = build_selection_report(run_pipeline(config), "f.atns", std::nullopt);
    CHECK(payload_bytes(a) == payload_bytes(b));
}

TEST_CASE("reports tolerate unknown trailing fields but gate on schema_version") {
    RunConfig config;
    config.m = 2;
    json report = build_selection_report(run_pipeline(config), "f.atns", std::nullopt);
    report["later_addition"] = {{"x", 1}};
    require_schema(report);  // unknown extras are fine

    json broken = report;
    broken["schema_version"] = 999;
    CHECK_THROWS_AS(require_schema(broken), Error);
    json missing = report;
    missing.erase("schema_version");
    CHECK_THROWS_AS(require_schema(missing), Error);
}

TEST_CASE("probe reports expose the profile with 1-based depth") {
    RunConfig config;
    config.m = 4;
    config.probe_prompts = 3;
    const ProbeResult probe = run_layer_probe(config);
    const json report = build_probe_report(probe);
    require_schema(report);
    CHECK(report["payload"]["rows"] == 12);
    CHECK(report["payload"]["layer_profile"]["d_star"].get<int>() >= 1);
    CHECK(report["payload"]["layer_profile"]["corr_curve"].size() == config.layers);

    const std::string tsv = probe_curve_tsv(probe.profile);
    CHECK(tsv.rfind("depth\tcorrelation\n", 0) == 0);
    // one line per layer plus the header
    CHECK(std::count(tsv.begin(), tsv.end(), '\n') == static_cast<long>(config.layers) + 1);
}

TEST_CASE("redundant layers probe to depth 1") {
    RunConfig config;
    config.m = 4;
    config.probe_prompts = 2;
    config.layer_variation = 0.0;
    const ProbeResult probe = run_layer_probe(config);
    CHECK(probe.profile.d_star == 0);
    CHECK(build_probe_report(probe)["payload"]["layer_profile"]["d_star"] == 1);
}

TEST_CASE("tau = 1 pushes the depth to the last layer") {
    RunConfig config;
    config.m = 4;
    config.probe_prompts = 2;
    config.tau = 1.0;
    const ProbeResult probe = run_layer_probe(config);
    CHECK(probe.profile.d_star == config.layers - 1);
}

TEST_CASE("averaging over seeds changes the row count") {
    RunConfig config;
    config.m = 4;
    config.probe_prompts = 5;
    config.average_seeds = true;
    const ProbeResult probe = run_layer_probe(config);
    CHECK(probe.rows == 5);
}

TEST_CASE("probing requires at least two seeds") {
    RunConfig config;
    config.m = 1;
    CHECK_THROWS_AS(run_layer_probe(config), Error);
}

TEST_CASE("score record is self-describing") {
    AcquisitionScore score;
    score.value = 0.125;
    score.kind = ScoreKind::bansa_e;
    score.k_used = 10;
    const json record = build_score_record(4, 4, 10, 0.2, 7, score);
    require_schema(record);
    CHECK(record["kind"] == "score_record");
    CHECK(record["payload"]["score"] == 0.125);
    CHECK(record["payload"]["score_kind"] == "bansa_e");
    CHECK(record["payload"]["input"]["rows"] == 4);
}
