#include "sacot/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sacot/error.hpp"

namespace sacot {

namespace {

using nlohmann::json;

constexpr StepVerdict::Status kStatuses[] = {StepVerdict::Status::Valid, StepVerdict::Status::HallucinatedRule,
                                             StepVerdict::Status::RuleMatchError, StepVerdict::Status::KBUpdateError,
                                             StepVerdict::Status::RedundantReinference};

StepVerdict::Status status_from(const std::string& name) {
  for (auto s : kStatuses) {
    if (to_string(s) == name) return s;
  }
  throw SchemaMismatch(0, "unknown step status '" + name + "'");
}

ErrorClass error_class_from(const std::string& name) {
  for (auto c : kErrorClasses) {
    if (to_string(c) == name) return c;
  }
  throw SchemaMismatch(0, "unknown error class '" + name + "'");
}

std::string fixed(double v, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

void taxonomy_table(std::ostringstream& md, const std::vector<std::pair<std::string, ErrorHistogram>>& rows) {
  md << "| Run |";
  for (auto c : kErrorClasses) md << ' ' << label(c) << " |";
  md << " Total |\n|---|";
  for (std::size_t i = 0; i < kErrorClasses.size(); ++i) md << "---:|";
  md << "---:|\n";
  for (const auto& [name, h] : rows) {
    md << "| " << name << " |";
    for (auto c : kErrorClasses) md << ' ' << h[c] << " |";
    md << ' ' << h.total() << " |\n";
  }
}

}  // namespace

json to_json(const VerificationReport& r) {
  json j;
  j["instance_id"] = r.instance_id;
  j["halted"] = r.halted;
  j["cyclic"] = r.cyclic;
  j["validate_consistent"] = r.validate_consistent;
  j["final_answer_correct"] = r.final_answer_correct;
  j["semantic_checked"] = r.semantic_checked;
  j["step_verdicts"] = json::array();
  for (const auto& v : r.step_verdicts) {
    j["step_verdicts"].push_back({{"step_index", v.step_index}, {"status", to_string(v.status)}, {"detail", v.detail}});
  }
  j["error_classes"] = json::array();
  for (auto c : r.error_classes) j["error_classes"].push_back(to_string(c));
  return j;
}

VerificationReport verification_from_json(const json& j) {
  VerificationReport r;
  r.instance_id = j.at("instance_id").get<std::string>();
  r.halted = j.at("halted").get<bool>();
  r.cyclic = j.at("cyclic").get<bool>();
  r.validate_consistent = j.at("validate_consistent").get<bool>();
  r.final_answer_correct = j.at("final_answer_correct").get<bool>();
  r.semantic_checked = j.value("semantic_checked", true);
  for (const auto& v : j.at("step_verdicts")) {
    r.step_verdicts.push_back(StepVerdict{v.at("step_index").get<std::size_t>(),
                                          status_from(v.at("status").get<std::string>()),
                                          v.value("detail", std::string{})});
  }
  for (const auto& c : j.at("error_classes")) r.error_classes.push_back(error_class_from(c.get<std::string>()));
  return r;
}

json to_json(const ConfusionMatrix& m) {
  json j;
  j["labels"] = {"True", "False", "Uncertain"};
  j["matrix"] = json::array();
  j["unknown"] = json::array();
  for (const auto& row : m.counts) {
    j["matrix"].push_back({row[0], row[1], row[2]});
    j["unknown"].push_back(row[ConfusionMatrix::kSpill]);
  }
  j["recall"] = json::array();
  for (auto t : {TruthValue::True, TruthValue::False, TruthValue::Uncertain}) {
    const auto r = m.recall(t);
    j["recall"].push_back(r ? json(*r) : json(nullptr));
  }
  return j;
}

ConfusionMatrix confusion_from_json(const json& j) {
  ConfusionMatrix m;
  const auto& matrix = j.at("matrix");
  const auto& unknown = j.at("unknown");
  if (matrix.size() != 3 || unknown.size() != 3) throw SchemaMismatch(0, "confusion matrix must be 3x3");
  for (std::size_t r = 0; r < 3; ++r) {
    if (matrix[r].size() != 3) throw SchemaMismatch(0, "confusion matrix must be 3x3");
    for (std::size_t c = 0; c < 3; ++c) m.counts[r][c] = matrix[r][c].get<std::size_t>();
    m.counts[r][ConfusionMatrix::kSpill] = unknown[r].get<std::size_t>();
  }
  return m;
}

json to_json(const ErrorHistogram& h) {
  json j = json::object();
  for (auto c : kErrorClasses) j[std::string(to_string(c))] = h[c];
  return j;
}

ErrorHistogram histogram_from_json(const json& j) {
  ErrorHistogram h;
  for (auto c : kErrorClasses) h[c] = j.value(std::string(to_string(c)), std::size_t{0});
  return h;
}

json to_json(const InstanceResult& r) {
  json j;
  j["id"] = r.id;
  j["prompt_hash"] = r.prompt_hash;
  j["raw_output"] = r.raw_output;
  j["extracted_answer"] = r.extracted_answer.str();
  j["gold"] = r.gold.str();
  j["correct"] = r.correct;
  j["verification"] = r.verification ? to_json(*r.verification) : json(nullptr);
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

InstanceResult instance_result_from_json(const json& j) {
  InstanceResult r;
  r.id = j.at("id").get<std::string>();
  r.prompt_hash = j.value("prompt_hash", std::string{});
  r.raw_output = j.value("raw_output", std::string{});
  r.extracted_answer = Answer::parse(j.at("extracted_answer").get<std::string>());
  r.gold = Answer::parse(j.at("gold").get<std::string>());
  r.correct = j.at("correct").get<bool>();
  if (j.contains("verification") && !j["verification"].is_null()) {
    r.verification = verification_from_json(j["verification"]);
  }
  r.error = j.value("error", std::string{});
  return r;
}

json to_json(const EvalReport& report) {
  json j;
  j["run_id"] = report.run_id;
  j["created_at"] = report.created_at;
  j["config"] = report.config_echo;
  j["dataset"] = std::string(to_string(report.dataset));
  j["variant"] = std::string(to_string(report.variant));
  j["instances"] = report.per_instance.size();
  j["correct"] = report.correct_count();
  j["accuracy"] = report.accuracy;
  j["partial"] = report.partial;
  j["confusion"] = report.confusion ? to_json(*report.confusion) : json(nullptr);
  j["error_histogram"] = to_json(report.error_histogram);
  j["per_instance"] = json::array();
  for (const auto& r : report.per_instance) j["per_instance"].push_back(to_json(r));
  return j;
}

EvalReport eval_report_from_json(const json& j) {
  try {
    EvalReport report;
    report.run_id = j.at("run_id").get<std::string>();
    report.created_at = j.value("created_at", std::string{});
    report.config_echo = j.value("config", json::object());
    const auto dataset = parse_dataset(j.at("dataset").get<std::string>());
    const auto variant = parse_variant(j.at("variant").get<std::string>());
    if (!dataset || !variant) throw SchemaMismatch(0, "unknown dataset or variant");
    report.dataset = *dataset;
    report.variant = *variant;
    report.accuracy = j.at("accuracy").get<double>();
    report.partial = j.value("partial", false);
    if (j.contains("confusion") && !j["confusion"].is_null()) report.confusion = confusion_from_json(j["confusion"]);
    report.error_histogram = histogram_from_json(j.at("error_histogram"));
    for (const auto& r : j.at("per_instance")) report.per_instance.push_back(instance_result_from_json(r));
    return report;
  } catch (const json::exception& e) {
    throw SchemaMismatch(0, std::string("malformed report: ") + e.what());
  }
}

EvalReport load_eval_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SchemaMismatch(0, std::string("invalid JSON: ") + e.what());
  }
  return eval_report_from_json(j);
}

std::string render_markdown(const std::vector<EvalReport>& reports) {
  std::ostringstream md;
  md << "# Evaluation report\n\n";
  md << "| Dataset | Variant | Model | Instances | Correct | Accuracy | Unknown answers | Partial |\n";
  md << "|---|---|---|---:|---:|---:|---:|---|\n";
  for (const auto& r : reports) {
    const std::size_t unknown = static_cast<std::size_t>(std::count_if(
        r.per_instance.begin(), r.per_instance.end(), [](const InstanceResult& x) { return x.extracted_answer.is_unknown(); }));
    md << "| " << to_string(r.dataset) << " | " << to_string(r.variant) << " | "
       << r.config_echo.value("model_name", std::string{}) << " | " << r.per_instance.size() << " | "
       << r.correct_count() << " | " << fixed(r.accuracy) << " | " << unknown << " | " << (r.partial ? "yes" : "no")
       << " |\n";
  }

  for (const auto& r : reports) {
    if (!r.confusion) continue;
    const auto& m = *r.confusion;
    md << "\n## Confusion matrix: " << to_string(r.variant) << "\n\n";
    md << "| Gold \\ Predicted | True | False | Uncertain | Unknown | Recall |\n";
    md << "|---|---:|---:|---:|---:|---:|\n";
    const TruthValue order[] = {TruthValue::True, TruthValue::False, TruthValue::Uncertain};
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& row = m.counts[i];
      const auto recall = m.recall(order[i]);
      md << "| " << to_string(order[i]) << " | " << row[0] << " | " << row[1] << " | " << row[2] << " | " << row[3]
         << " | " << (recall ? fixed(*recall) : std::string("-")) << " |\n";
    }
  }

  std::vector<std::pair<std::string, ErrorHistogram>> rows;
  for (const auto& r : reports) {
    if (is_symbolic(r.variant)) rows.emplace_back(std::string(to_string(r.variant)), r.error_histogram);
  }
  if (!rows.empty()) {
    md << "\n## Reasoning errors\n\n";
    taxonomy_table(md, rows);
  }
  return md.str();
}

std::string render_markdown(const std::vector<VerificationReport>& reports) {
  ErrorHistogram total;
  std::size_t clean = 0;
  std::size_t consistent = 0;
  std::size_t correct = 0;
  for (const auto& r : reports) {
    total += classify_errors(r);
    clean += r.clean() ? 1 : 0;
    consistent += r.validate_consistent ? 1 : 0;
    correct += r.final_answer_correct ? 1 : 0;
  }
  std::ostringstream md;
  md << "# Trace verification\n\n";
  md << "| Traces | Clean | Validate consistent | Final answer correct |\n|---:|---:|---:|---:|\n";
  md << "| " << reports.size() << " | " << clean << " | " << consistent << " | " << correct << " |\n\n";
  md << "## Reasoning errors\n\n";
  taxonomy_table(md, {{"all", total}});
  md << "\n## Per trace\n\n| Instance | Errors |\n|---|---|\n";
  for (const auto& r : reports) {
    md << "| " << r.instance_id << " | ";
    if (r.error_classes.empty()) md << "-";
    for (std::size_t i = 0; i < r.error_classes.size(); ++i) md << (i ? ", " : "") << label(r.error_classes[i]);
    md << " |\n";
  }
  return md.str();
}

std::vector<std::string> emit_report(const std::vector<EvalReport>& reports, const std::string& dir,
                                     const std::vector<ReportFormat>& formats) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  const bool want_json = std::find(formats.begin(), formats.end(), ReportFormat::Json) != formats.end();
  const bool want_md = std::find(formats.begin(), formats.end(), ReportFormat::Markdown) != formats.end();
  if (want_json) {
    for (const auto& r : reports) {
      const auto path = std::filesystem::path(dir) / ("report-" + std::string(to_string(r.variant)) + ".json");
      write_file(path, to_json(r).dump(2) + "\n");
      written.push_back(path.string());
    }
  }
  if (want_md) {
    const auto path = std::filesystem::path(dir) / "report.md";
    write_file(path, render_markdown(reports));
    written.push_back(path.string());
  }
  return written;
}

}  // namespace sacot
