// Command-line front end. Everything substantive lives behind the shared
// library's C API; this file only parses arguments and moves bytes around.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bansa.h"

namespace {

int report_failure(bansa_status status, const char* command) {
    std::fprintf(stderr, "bansa %s: %s\n", command, bansa_last_error());
    return bansa_exit_code(status);
}

struct OwnedString {
    char* value = nullptr;
    ~OwnedString() { bansa_string_free(value); }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Attention-uncertainty scoring and noise seed selection"};
    app.require_subcommand(1);

    // score
    std::string score_file;
    std::uint32_t score_k = 10;
    double score_p = 0.2;
    std::uint64_t score_seed = 0;
    auto* score_cmd =
        app.add_subcommand("score", "Score one attention map file (rank-2 tensor)");
    score_cmd->add_option("map", score_file, "attention map tensor file")->required();
    score_cmd->add_option("-k,--k", score_k, "stochastic samples per map");
    score_cmd->add_option("-p,--drop-prob", score_p, "Bernoulli drop probability");
    score_cmd->add_option("-s,--seed", score_seed, "masking stream seed");

    // select
    std::string select_config;
    std::string select_out = ".";
    auto* select_cmd =
        app.add_subcommand("select", "Run the full selection pipeline from a config file");
    select_cmd->add_option("config", select_config, "run configuration (JSON)")->required();
    select_cmd->add_option("-o,--out", select_out, "output directory");

    // probe-layers
    std::string probe_config;
    std::string probe_out = ".";
    auto* probe_cmd = app.add_subcommand(
        "probe-layers", "Calibrate the truncation depth from per-layer scores");
    probe_cmd->add_option("config", probe_config, "run configuration (JSON)")->required();
    probe_cmd->add_option("-o,--out", probe_out, "output directory");

    // analyze
    std::string analyze_report;
    std::vector<std::string> analyze_low;
    std::vector<std::string> analyze_high;
    double analyze_cutoff = 0.25;
    auto* analyze_cmd = app.add_subcommand(
        "analyze", "Group metrics over tensor files, or replay a selection report");
    analyze_cmd->add_option("report", analyze_report, "selection report to replay");
    analyze_cmd->add_option("--low", analyze_low, "first group of tensor files");
    analyze_cmd->add_option("--high", analyze_high, "second group of tensor files");
    analyze_cmd->add_option("--cutoff", analyze_cutoff,
                            "normalized low-pass cutoff for trajectory variation");

    // oracle
    auto* oracle_cmd =
        app.add_subcommand("oracle", "Run the brute-force verification suite");

    CLI11_PARSE(app, argc, argv);

    if (score_cmd->parsed()) {
        bansa_tensor* tensor = nullptr;
        bansa_status status = bansa_tensor_read(score_file.c_str(), &tensor);
        if (status != BANSA_OK) return report_failure(status, "score");
        OwnedString record;
        status = bansa_score_record(tensor, score_k, score_p, score_seed, &record.value);
        bansa_tensor_free(tensor);
        if (status != BANSA_OK) return report_failure(status, "score");
        std::printf("%s\n", record.value);
        return 0;
    }

    if (select_cmd->parsed()) {
        OwnedString report_path;
        const bansa_status status =
            bansa_select(select_config.c_str(), select_out.c_str(), &report_path.value);
        if (status != BANSA_OK) return report_failure(status, "select");
        std::printf("%s\n", report_path.value);
        return 0;
    }

    if (probe_cmd->parsed()) {
        OwnedString report_path;
        OwnedString curve_path;
        const bansa_status status = bansa_probe_layers(
            probe_config.c_str(), probe_out.c_str(), &report_path.value, &curve_path.value);
        if (status != BANSA_OK) return report_failure(status, "probe-layers");
        std::printf("%s\n%s\n", report_path.value, curve_path.value);
        return 0;
    }

    if (analyze_cmd->parsed()) {
        OwnedString json;
        bansa_status status;
        if (!analyze_report.empty()) {
            if (!analyze_low.empty() || !analyze_high.empty()) {
                std::fprintf(stderr,
                             "bansa analyze: pass either a report or file groups, not both\n");
                return 1;
            }
            status = bansa_analyze_report(analyze_report.c_str(), &json.value);
        } else {
            if (analyze_low.empty()) {
                std::fprintf(stderr, "bansa analyze: no inputs given\n");
                return 1;
            }
            std::vector<const char*> low;
            std::vector<const char*> high;
            for (const auto& f : analyze_low) low.push_back(f.c_str());
            for (const auto& f : analyze_high) high.push_back(f.c_str());
            status = bansa_analyze_files(low.data(), low.size(),
                                         high.empty() ? nullptr : high.data(), high.size(),
                                         analyze_cutoff, &json.value);
        }
        if (status != BANSA_OK) return report_failure(status, "analyze");
        std::printf("%s\n", json.value);
        return 0;
    }

    if (oracle_cmd->parsed()) {
        OwnedString text;
        int failures = 0;
        const bansa_status status = bansa_oracle(&text.value, &failures);
        if (status != BANSA_OK) return report_failure(status, "oracle");
        std::printf("%s", text.value);
        if (failures > 0) {
            std::fprintf(stderr, "bansa oracle: %d check(s) failed\n", failures);
            return 3;
        }
        return 0;
    }

    return 0;
}
