#include "sacot/prompt_builder.hpp"

#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sacot/error.hpp"
#include "sacot/reasoner.hpp"
#include "sacot/trace.hpp"

namespace sacot {

namespace {

using nlohmann::json;

constexpr std::string_view kBoilerplate =
    "Based on the above information, is the following statement true, false, or unknown? ";
constexpr std::string_view kProntoBoilerplate = "Is the following statement true or false? ";

struct HeldOut {
  const char* id;
  const char* context;
  const char* statement;
  const char* answer;
};

// Hand-written held-out problems in the ProofWriter and ProntoQA dialects; never drawn from evaluation data.
constexpr HeldOut kProofWriterHeldOut[] = {
    {"heldout-pw-1",
     "The bear is big. The bear likes the cat. The cat is round. The cat does not chase the bear. "
     "If something likes the cat then it is kind. If something is kind and big then it is nice. "
     "If something is nice then it chases the dog. Round things are young.",
     "The bear chases the dog.", "True"},
    {"heldout-pw-2",
     "Dave is cold. Dave is not white. Fiona is smart. If something is cold then it is rough. "
     "Rough things are not young. If Fiona is smart then Fiona is green. All green things are kind.",
     "Dave is young.", "False"},
    {"heldout-pw-3",
     "Harry is blue. Harry is not quiet. If something is quiet then it is furry. "
     "If something is blue and not quiet then it is cold. Cold things are round.",
     "Harry is furry.", "Uncertain"},
};

constexpr HeldOut kProntoHeldOut[] = {
    {"heldout-pq-1",
     "Every wumpus is a tumpus. Each tumpus is not bright. Tumpuses are jompuses. Every jompus is sour. "
     "Yumpuses are bright. Max is a wumpus.",
     "Max is sour.", "True"},
    {"heldout-pq-2",
     "Each rompus is a zumpus. Zumpuses are not floral. Every zumpus is an impus. Impuses are shy. "
     "Sally is a rompus.",
     "Sally is floral.", "False"},
};

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    lines.emplace_back(text.substr(pos, end - pos));
    if (end >= text.size()) break;
    pos = end + 1;
  }
  return lines;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i > 0) out += '\n';
    out += lines[i];
  }
  return out;
}

std::string options_line(const Instance& instance) {
  if (instance.question.options.empty()) return std::string(kDefaultOptions);
  std::string out;
  for (std::size_t i = 0; i < instance.question.options.size(); ++i) {
    if (i > 0) out += ' ';
    out += static_cast<char>('A' + i);
    out += ") ";
    out += instance.question.options[i];
  }
  return out;
}

std::string rule_line(const Rule& rule) {
  return "# (Rule" + std::to_string(rule.tag) + "): " + (rule.surface.empty() ? render(rule) : rule.surface);
}

std::string question_line(const Instance& instance) {
  std::string line = "# (Question): " + instance.question.text;
  if (instance.question.kind == Question::Kind::MultipleChoice) line += " Options: " + options_line(instance);
  return line;
}

void append_rules_block(std::string& out, std::string_view title, const Instance& instance) {
  out += title;
  out += '\n';
  for (const auto& r : instance.rules) {
    out += rule_line(r);
    out += '\n';
  }
  out += question_line(instance);
  out += '\n';
}

std::string answer_json_value(const Answer& a) {
  if (a.is_truth()) return std::string(1, truth_letter(a.truth_value()));
  return a.str();
}

std::string cot_reasoning(const Instance& instance, const Solution& solution) {
  std::string text;
  auto sentence = [&text](std::string s) {
    if (!text.empty()) text += ' ';
    text += s;
  };
  for (const auto& step : solution.trace.steps) {
    if (step.kind == TraceStep::Kind::FactCollect) {
      sentence(step.produced.front() + ".");
    } else if (step.kind == TraceStep::Kind::Infer && !step.already_in_kb) {
      const Rule* rule = instance.find_rule(step.rule_tag);
      std::string s = rule ? render(*rule) : std::string();
      sentence(s + " So " + step.produced.front() + ".");
    }
  }
  const std::string statement = render(*instance.question.literal);
  switch (solution.answer) {
    case TruthValue::True:
      sentence("Therefore the statement '" + statement + "' is true.");
      break;
    case TruthValue::False:
      sentence("Therefore the statement '" + statement + "' is false.");
      break;
    case TruthValue::Uncertain:
      sentence("Neither '" + statement + "' nor its negation follows, so it is uncertain.");
      break;
  }
  return text;
}

Instance instance_from_held_out(const HeldOut& h, Dataset dataset) {
  const std::string_view prefix = dataset == Dataset::ProntoQA ? kProntoBoilerplate : kBoilerplate;
  std::vector<std::string> options;
  if (dataset == Dataset::ProntoQA) options = {"True", "False"};
  Answer gold = parse_gold_label(h.answer, dataset, options);
  return make_instance(h.id, dataset, h.context, std::string(prefix) + h.statement, std::move(options), gold);
}

}  // namespace

std::string remove_kb_lines(std::string_view text) {
  static const std::regex kb_line(R"(^\s*#\s*KB\s*=)");
  std::vector<std::string> kept;
  for (auto& line : split_lines(text)) {
    if (!std::regex_search(line, kb_line)) kept.push_back(std::move(line));
  }
  return join_lines(kept);
}

std::string replace_validate_line(std::string_view text) {
  static const std::regex validate_line(R"(^(\s*)=>\s*Validate\s*\(.*\)\s*=\s*\**\s*([A-Za-z]+)\**\s*\.?\s*$)");
  std::vector<std::string> lines = split_lines(text);
  for (auto& line : lines) {
    std::smatch m;
    if (std::regex_match(line, m, validate_line)) line = m.str(1) + "=> Answer = " + m.str(2) + ".";
  }
  return join_lines(lines);
}

std::string symbolic_solution(const std::string& full_trace_text, PromptVariant variant) {
  switch (variant) {
    case PromptVariant::SymbolicAidedNoKB:
      return remove_kb_lines(full_trace_text);
    case PromptVariant::SymbolicAidedNoValidate:
      return replace_validate_line(full_trace_text);
    default:
      return full_trace_text;
  }
}

PromptText build_prompt(PromptVariant variant, const std::vector<Demonstration>& demos, const Instance& instance) {
  if (demos.empty()) throw MissingDemonstrations();
  PromptText prompt;
  prompt.variant = variant;
  prompt.instance_id = instance.id;
  std::string& out = prompt.text;

  if (is_symbolic(variant)) {
    if (instance.rules.empty() ||
        std::any_of(instance.rules.begin(), instance.rules.end(), [](const Rule& r) { return r.tag <= 0; })) {
      throw UntaggedRules(instance.id);
    }
    out += kSymbolicInstruction;
    out += '\n';
    out += kSeparator;
    out += '\n';
    for (std::size_t i = 0; i < demos.size(); ++i) {
      append_rules_block(out, "### Example" + std::to_string(i + 1) + ": Given list of facts and rules:",
                         demos[i].instance);
      std::string solution = demos[i].solution_text;
      while (!solution.empty() && solution.back() == '\n') solution.pop_back();
      out += "# (Answer): ";
      out += solution;
      out += '\n';
      out += kSeparator;
      out += '\n';
    }
    append_rules_block(out, "### Given list of facts and rules:", instance);
    out += "# (Answer):";
    if (variant == PromptVariant::SymbolicAidedNoKB) out = remove_kb_lines(out);
    if (variant == PromptVariant::SymbolicAidedNoValidate) out = replace_validate_line(out);
    return prompt;
  }

  auto block = [&out](const Instance& inst) {
    out += "Context: " + inst.context + "\n";
    out += "Question: " + inst.question.text + "\n";
    out += "Options: " + options_line(inst) + "\n";
  };
  for (const auto& demo : demos) {
    block(demo.instance);
    out += "The correct option is: " + demo.solution_text + "\n";
    out += kSeparator;
    out += '\n';
  }
  block(instance);
  out += "The correct option is:";
  return prompt;
}

Demonstration make_demonstration(const Instance& instance, PromptVariant variant) {
  Solution solution;
  try {
    solution = solve_with_trace(instance);
  } catch (const AmbiguousAnswer& e) {
    throw OracleUnsolvable(e.what());
  }
  if (!instance.gold.is_unknown() && !(instance.gold == Answer::truth(solution.answer))) {
    throw OracleUnsolvable("oracle answer " + std::string(to_string(solution.answer)) + " disagrees with gold " +
                           instance.gold.str() + " for " + instance.id);
  }
  Demonstration demo;
  demo.instance = instance;
  demo.answer = Answer::truth(solution.answer);
  const std::string letter = answer_json_value(demo.answer);
  switch (variant) {
    case PromptVariant::Standard:
      demo.solution_text = "{\"answer\": " + json(letter).dump() + "}";
      break;
    case PromptVariant::CoT:
      demo.solution_text = "{\"reasoning\": " + json(cot_reasoning(instance, solution)).dump() +
                           ", \"answer\": " + json(letter).dump() + "}";
      break;
    default:
      demo.solution_text = symbolic_solution(render_trace(solution.trace), variant);
      break;
  }
  return demo;
}

std::string demonstrations_to_json(const DemoSet& set) {
  json doc;
  doc["dataset"] = std::string(to_string(set.dataset));
  doc["variant"] = std::string(to_string(set.variant));
  doc["demos"] = json::array();
  for (const auto& d : set.demos) {
    json entry;
    entry["instance_id"] = d.instance.id;
    entry["context"] = d.instance.context;
    entry["question"] = d.instance.question.text;
    entry["solution_text"] = d.solution_text;
    entry["answer"] = d.answer.str();
    if (d.instance.question.kind == Question::Kind::MultipleChoice) entry["options"] = d.instance.question.options;
    doc["demos"].push_back(std::move(entry));
  }
  return doc.dump(2);
}

DemoSet demonstrations_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaMismatch(0, std::string("demonstration file is not JSON: ") + e.what());
  }
  DemoSet set;
  if (!doc.is_object() || !doc.contains("demos") || !doc["demos"].is_array()) {
    throw SchemaMismatch(0, "expected {dataset, variant, demos: [...]}");
  }
  const auto dataset = parse_dataset(doc.value("dataset", "proofwriter"));
  const auto variant = parse_variant(doc.value("variant", "symbolic"));
  if (!dataset) throw SchemaMismatch(0, "unknown dataset");
  if (!variant) throw SchemaMismatch(0, "unknown variant");
  set.dataset = *dataset;
  set.variant = *variant;
  std::size_t index = 0;
  for (const auto& entry : doc["demos"]) {
    if (!entry.is_object() || !entry.contains("context") || !entry.contains("question") ||
        !entry.contains("solution_text") || !entry.contains("answer")) {
      throw SchemaMismatch(index, "demo entries need context, question, solution_text and answer");
    }
    std::vector<std::string> options = entry.value("options", std::vector<std::string>{});
    const std::string answer = entry["answer"].get<std::string>();
    Demonstration d;
    d.answer = parse_gold_label(answer, set.dataset, options);
    d.instance = make_instance(entry.value("instance_id", "demo-" + std::to_string(index)), set.dataset,
                               entry["context"].get<std::string>(), entry["question"].get<std::string>(),
                               std::move(options), d.answer);
    d.solution_text = entry["solution_text"].get<std::string>();
    set.demos.push_back(std::move(d));
    ++index;
  }
  return set;
}

DemoSet load_demonstrations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return demonstrations_from_json(buffer.str());
}

void save_demonstrations(const DemoSet& set, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << demonstrations_to_json(set) << '\n';
}

std::vector<Demonstration> adapt_demonstrations(const DemoSet& set, PromptVariant variant) {
  if (set.variant == variant) return set.demos;
  std::vector<Demonstration> out;
  for (const auto& d : set.demos) {
    try {
      out.push_back(make_demonstration(d.instance, variant));
    } catch (const OracleUnsolvable& e) {
      throw OracleUnsolvable("demonstration " + d.instance.id + " was written for variant " +
                             std::string(to_string(set.variant)) + " and cannot be regenerated for " +
                             std::string(to_string(variant)) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Instance> default_demo_instances(Dataset dataset) {
  std::vector<Instance> out;
  if (dataset == Dataset::ProofWriter) {
    for (const auto& h : kProofWriterHeldOut) out.push_back(instance_from_held_out(h, dataset));
  } else if (dataset == Dataset::ProntoQA) {
    for (const auto& h : kProntoHeldOut) out.push_back(instance_from_held_out(h, dataset));
  }
  return out;
}

std::vector<Demonstration> default_demonstrations(Dataset dataset, PromptVariant variant, std::size_t k) {
  const auto pool = default_demo_instances(dataset);
  if (pool.empty()) throw MissingDemonstrations();
  std::vector<Demonstration> out;
  for (const auto& inst : pool) {
    if (out.size() == k) break;
    out.push_back(make_demonstration(inst, variant));
  }
  return out;
}

std::vector<Demonstration> select_demonstrations(const std::vector<Instance>& pool, PromptVariant variant,
                                                 std::size_t k) {
  std::vector<Demonstration> candidates;
  for (const auto& inst : pool) {
    try {
      candidates.push_back(make_demonstration(inst, variant));
    } catch (const Error&) {
    }
  }
  std::vector<Demonstration> chosen;
  std::vector<bool> taken(candidates.size(), false);
  std::set<std::string> answers;
  for (std::size_t i = 0; i < candidates.size() && chosen.size() < k; ++i) {
    if (answers.insert(candidates[i].answer.str()).second) {
      chosen.push_back(candidates[i]);
      taken[i] = true;
    }
  }
  for (std::size_t i = 0; i < candidates.size() && chosen.size() < k; ++i) {
    if (!taken[i]) chosen.push_back(candidates[i]);
  }
  return chosen;
}

}  // namespace sacot
