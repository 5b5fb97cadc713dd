#include "sacot/dataset.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "sacot/error.hpp"

namespace sacot {

namespace {

using nlohmann::json;

constexpr std::array<std::pair<Dataset, std::string_view>, 4> kDatasetNames{{
    {Dataset::ProofWriter, "proofwriter"},
    {Dataset::ProntoQA, "prontoqa"},
    {Dataset::LogicalDeduction, "logicaldeduction"},
    {Dataset::FOLIO, "folio"},
}};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string string_field(const json& record, const char* name, std::size_t index) {
  if (!record.contains(name)) throw SchemaMismatch(index, std::string("missing field '") + name + "'");
  const json& v = record[name];
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "True" : "False";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw SchemaMismatch(index, std::string("field '") + name + "' must be a string");
}

std::vector<std::string> options_field(const json& record, std::size_t index) {
  std::vector<std::string> out;
  if (!record.contains("options") || record["options"].is_null()) return out;
  if (!record["options"].is_array()) throw SchemaMismatch(index, "field 'options' must be an array");
  for (const auto& o : record["options"]) {
    if (!o.is_string()) throw SchemaMismatch(index, "options must be strings");
    out.push_back(strip_option_prefix(o.get<std::string>()));
  }
  return out;
}

Instance record_to_instance(const json& record, Dataset dataset, std::size_t index) {
  if (!record.is_object()) throw SchemaMismatch(index, "record is not a JSON object");
  if (record.contains("dataset") && record["dataset"].is_string()) {
    const auto named = parse_dataset(record["dataset"].get<std::string>());
    if (!named) throw SchemaMismatch(index, "unknown dataset '" + record["dataset"].get<std::string>() + "'");
    if (*named != dataset) {
      throw SchemaMismatch(index, "record belongs to dataset '" + std::string(to_string(*named)) + "'");
    }
  }
  std::string id = record.contains("id") ? string_field(record, "id", index) : std::to_string(index);
  std::string context = string_field(record, "context", index);
  std::string question = string_field(record, "question", index);
  std::vector<std::string> options = options_field(record, index);
  const std::string label = string_field(record, "answer", index);
  Answer gold = parse_gold_label(label, dataset, options);
  if (gold.is_unknown()) throw SchemaMismatch(index, "illegal answer label '" + label + "'");
  return make_instance(std::move(id), dataset, std::move(context), std::move(question), std::move(options), gold);
}

// ProofWriter's native layout: one theory with many questions.
void expand_native_proofwriter(const json& record, std::size_t index, std::vector<Instance>& out) {
  const std::string id = string_field(record, "id", index);
  const std::string theory = string_field(record, "theory", index);
  const json& questions = record["questions"];
  auto add = [&](const std::string& qid, const json& q) {
    if (!q.is_object()) throw SchemaMismatch(index, "question entries must be objects");
    const std::string text = q.contains("question") ? string_field(q, "question", index) : string_field(q, "text", index);
    const std::string label = q.contains("answer") ? string_field(q, "answer", index) : string_field(q, "label", index);
    Answer gold = parse_gold_label(label, Dataset::ProofWriter);
    if (gold.is_unknown()) throw SchemaMismatch(index, "illegal answer label '" + label + "'");
    out.push_back(make_instance(id + "_" + qid, Dataset::ProofWriter, theory, text, {}, gold));
  };
  if (questions.is_object()) {
    for (const auto& [qid, q] : questions.items()) add(qid, q);
  } else if (questions.is_array()) {
    std::size_t n = 0;
    for (const auto& q : questions) add(q.value("id", "Q" + std::to_string(++n)), q);
  } else {
    throw SchemaMismatch(index, "field 'questions' must be an object or array");
  }
}

void append_record(const json& record, Dataset dataset, std::size_t index, std::vector<Instance>& out) {
  if (record.is_object() && record.contains("theory") && record.contains("questions")) {
    expand_native_proofwriter(record, index, out);
  } else {
    out.push_back(record_to_instance(record, dataset, index));
  }
}

}  // namespace

std::string_view to_string(Dataset d) {
  for (const auto& [dataset, name] : kDatasetNames) {
    if (dataset == d) return name;
  }
  return "proofwriter";
}

std::optional<Dataset> parse_dataset(std::string_view name) {
  std::string n = to_lower(trim(name));
  n.erase(std::remove_if(n.begin(), n.end(), [](char c) { return c == '_' || c == '-' || c == ' '; }), n.end());
  for (const auto& [dataset, spelled] : kDatasetNames) {
    if (spelled == n) return dataset;
  }
  return std::nullopt;
}

bool is_three_way(Dataset d) { return d != Dataset::LogicalDeduction; }

bool Instance::fully_parsed() const noexcept {
  return std::none_of(rules.begin(), rules.end(), [](const Rule& r) { return r.opaque; });
}

bool Instance::oracle_solvable() const noexcept {
  return (dataset == Dataset::ProofWriter || dataset == Dataset::ProntoQA) && fully_parsed() && is_statement_query();
}

const Rule* Instance::find_rule(int tag) const noexcept {
  for (const auto& r : rules) {
    if (r.tag == tag) return &r;
  }
  return nullptr;
}

std::string strip_option_prefix(std::string_view option) {
  static const std::regex prefix(R"(^\s*\(?[A-Ga-g]\)\s*)");
  return std::regex_replace(std::string(option), prefix, "", std::regex_constants::format_first_only);
}

Answer parse_gold_label(std::string_view label, Dataset dataset, const std::vector<std::string>& options) {
  const std::string_view l = trim(label);
  static const std::regex lettered(R"(^\(?([A-Ga-g])\)?(?:\s.*)?$)");
  std::cmatch m;
  const std::string s(l);
  if (std::regex_match(s.c_str(), m, lettered)) {
    const char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(m.str(1)[0])));
    const std::size_t idx = static_cast<std::size_t>(letter - 'A');
    if (!is_three_way(dataset)) {
      if (!options.empty() && idx >= options.size()) return Answer::unknown();
      return Answer::option(letter);
    }
    if (idx < options.size()) {
      if (auto t = parse_truth_value(trim(options[idx]))) return Answer::truth(*t);
      return Answer::unknown();
    }
    if (auto t = truth_from_letter(letter)) return Answer::truth(*t);
    return Answer::unknown();
  }
  if (!is_three_way(dataset)) return Answer::unknown();
  if (auto t = parse_truth_value(l)) return Answer::truth(*t);
  return Answer::unknown();
}

Instance make_instance(std::string id, Dataset dataset, std::string context, std::string question_text,
                       std::vector<std::string> options, Answer gold) {
  Instance inst;
  inst.id = std::move(id);
  inst.dataset = dataset;
  inst.context = std::move(context);
  inst.gold = gold;

  ContextParse parsed = parse_context(inst.context);
  inst.rules = std::move(parsed.rules);
  inst.warnings = std::move(parsed.warnings);

  // Three-way datasets list True/False/Uncertain as options; the question itself is a statement.
  const bool multiple_choice = !is_three_way(dataset);
  try {
    inst.question = parse_question(question_text, multiple_choice ? options : std::vector<std::string>{});
    if (!multiple_choice && inst.question.kind == Question::Kind::Statement) inst.question.options = options;
  } catch (const UnparsedQuestion& e) {
    inst.question = Question{};
    inst.question.text = question_text;
    inst.question.statement = question_text;
    inst.question.options = options;
    if (multiple_choice && !options.empty()) inst.question.kind = Question::Kind::MultipleChoice;
    inst.question_parsed = multiple_choice && !options.empty();
    if (!inst.question_parsed) inst.warnings.push_back(e.what());
  }
  return inst;
}

std::vector<Instance> parse_dataset_text(std::string_view text, Dataset dataset) {
  std::vector<Instance> out;
  const std::string_view body = trim(text);
  if (body.empty()) return out;

  if (body.front() == '[') {
    json doc;
    try {
      doc = json::parse(body);
    } catch (const json::parse_error& e) {
      throw SchemaMismatch(0, std::string("invalid JSON: ") + e.what());
    }
    std::size_t index = 0;
    for (const auto& record : doc) append_record(record, dataset, index++, out);
    return out;
  }

  std::size_t index = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaMismatch(index, std::string("invalid JSON line: ") + e.what());
    }
    append_record(record, dataset, index++, out);
  }
  return out;
}

std::vector<Instance> load_dataset(const std::string& path, Dataset dataset) {
  if (!std::filesystem::is_regular_file(path)) throw FileNotFound(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_dataset_text(buffer.str(), dataset);
}

std::string to_jsonl_record(const Instance& instance) {
  json record;
  record["id"] = instance.id;
  record["dataset"] = std::string(to_string(instance.dataset));
  record["context"] = instance.context;
  record["question"] = instance.question.text;
  if (!instance.question.options.empty()) record["options"] = instance.question.options;
  record["answer"] = instance.gold.str();
  return record.dump();
}

void save_dataset(const std::vector<Instance>& instances, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  for (const auto& inst : instances) out << to_jsonl_record(inst) << '\n';
}

}  // namespace sacot
