#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "acquisition.hpp"
#include "pipeline.hpp"

namespace bansa {

inline constexpr int kReportSchemaVersion = 1;

// Report documents are JSON with two top-level sections: "payload", which is
// a pure function of the inputs (identical runs produce identical bytes),
// and "timings_ms", which is not. schema_version gates breaking changes;
// unknown extra fields are ignored by readers.

nlohmann::json build_selection_report(const PipelineResult& result,
                                      const std::string& latent_file,
                                      const std::optional<std::string>& trajectory_file);

nlohmann::json build_probe_report(const ProbeResult& result);

// The (depth, correlation) curve as plot-ready tab-separated text, 1-based.
std::string probe_curve_tsv(const LayerProfile& profile);

nlohmann::json build_score_record(std::size_t rows, std::size_t cols, std::size_t k,
                                  double drop_prob, std::uint64_t stream_seed,
                                  const AcquisitionScore& score);

nlohmann::json build_analysis_report(const AnalysisResult& result);
nlohmann::json build_report_analysis(const ReportAnalysis& analysis);

// Canonical bytes of the deterministic section.
std::string payload_bytes(const nlohmann::json& report);

// Schema check used by every reader; throws on missing/incompatible version.
void require_schema(const nlohmann::json& report);

}  // namespace bansa
