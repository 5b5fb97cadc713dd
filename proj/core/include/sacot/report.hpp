#pragma once

// JSON and Markdown serialization of evaluation and verification reports.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sacot/evaluation.hpp"
#include "sacot/verifier.hpp"

namespace sacot {

nlohmann::json to_json(const VerificationReport& report);
VerificationReport verification_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ConfusionMatrix& m);
ConfusionMatrix confusion_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ErrorHistogram& h);
ErrorHistogram histogram_from_json(const nlohmann::json& j);

nlohmann::json to_json(const InstanceResult& r);
InstanceResult instance_result_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EvalReport& report);
/// Throws SchemaMismatch on malformed input.
EvalReport eval_report_from_json(const nlohmann::json& j);
EvalReport load_eval_report(const std::string& path);

/// Accuracy table (one row per report), confusion matrices, error-taxonomy table.
std::string render_markdown(const std::vector<EvalReport>& reports);
/// Error-taxonomy table for a verify-only run.
std::string render_markdown(const std::vector<VerificationReport>& reports);

enum class ReportFormat { Json, Markdown };

/// Writes report-<variant>.json per report plus report.md into `dir`.
/// Returns the written paths.
std::vector<std::string> emit_report(const std::vector<EvalReport>& reports, const std::string& dir,
                                     const std::vector<ReportFormat>& formats = {ReportFormat::Json,
                                                                                 ReportFormat::Markdown});

}  // namespace sacot
