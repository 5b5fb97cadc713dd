#include "sacot/verifier.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "sacot/error.hpp"

namespace sacot {

namespace {

using Status = StepVerdict::Status;

// The verifier's running view of the model's KB. Erroneous steps still add
// their products so that later steps are judged against the model's own state.
class ShadowKB {
 public:
  bool contains(std::string_view premise) const { return keys_.contains(normalize_premise(premise)); }

  void admit(std::string_view premise) {
    keys_.insert(normalize_premise(premise));
    if (auto lit = parse_premise(premise)) kb_.insert(*lit);
  }

  const std::set<std::string>& keys() const noexcept { return keys_; }
  const KnowledgeBase& kb() const noexcept { return kb_; }

 private:
  std::set<std::string> keys_;
  KnowledgeBase kb_;
};

bool has_instantiation(const Rule& rule, const Literal& produced, const std::vector<Literal>& cited) {
  std::set<std::string> cited_keys;
  for (const auto& c : cited) cited_keys.insert(c.key());

  auto holds = [&](const std::optional<Term>& binding) {
    const Literal conclusion = binding ? substitute(rule.conclusion, *binding) : rule.conclusion;
    if (!(conclusion == produced)) return false;
    return std::all_of(rule.conditions.begin(), rule.conditions.end(), [&](const Literal& c) {
      const Literal g = binding ? substitute(c, *binding) : c;
      return g.is_ground() && cited_keys.contains(g.key());
    });
  };

  if (!rule.has_variable()) return holds(std::nullopt);
  std::map<std::string, Term> candidates;
  auto add = [&candidates](const Literal& l) {
    candidates.emplace(l.subject.name, l.subject);
    if (l.predicate.object) candidates.emplace(l.predicate.object->name, *l.predicate.object);
  };
  add(produced);
  for (const auto& c : cited) add(c);
  return std::any_of(candidates.begin(), candidates.end(), [&](const auto& entry) { return holds(entry.second); });
}

std::string describe_set_difference(const std::set<std::string>& expected, const std::set<std::string>& actual) {
  std::string missing;
  std::string extra;
  for (const auto& k : expected) {
    if (!actual.contains(k)) missing += (missing.empty() ? "" : ", ") + k;
  }
  for (const auto& k : actual) {
    if (!expected.contains(k)) extra += (extra.empty() ? "" : ", ") + k;
  }
  std::string out = "KB snapshot differs from the derived KB";
  if (!missing.empty()) out += "; missing: " + missing;
  if (!extra.empty()) out += "; unexpected: " + extra;
  return out;
}

class Verifier {
 public:
  Verifier(const Instance& instance, const Trace& trace) : instance_(instance), trace_(trace) {
    report_.instance_id = instance.id;
    report_.semantic_checked =
        instance.dataset != Dataset::FOLIO && instance.fully_parsed() && instance.is_statement_query();
  }

  VerificationReport run() {
    for (std::size_t i = 0; i < trace_.steps.size(); ++i) {
      const TraceStep& step = trace_.steps[i];
      StepVerdict verdict{i, Status::Valid, {}};
      switch (step.kind) {
        case TraceStep::Kind::FactCollect:
          check_fact(step, verdict);
          break;
        case TraceStep::Kind::Infer:
          check_infer(step, verdict);
          break;
        case TraceStep::Kind::KBSnapshot:
          check_snapshot(step, verdict);
          break;
        case TraceStep::Kind::Comment:
          break;
      }
      report_.step_verdicts.push_back(std::move(verdict));
    }
    check_validate();
    collect_classes();
    return std::move(report_);
  }

 private:
  void flag(StepVerdict& v, Status s, std::string detail) {
    if (v.status != Status::Valid) return;
    v.status = s;
    v.detail = std::move(detail);
  }

  // Re-deriving a premise that is already in the KB without saying so.
  void check_repeat(const std::string& premise, bool marked, StepVerdict& v) {
    const bool present = shadow_.contains(premise);
    if (present && !marked) {
      report_.cyclic = true;
      flag(v, Status::RedundantReinference, "'" + premise + "' is already in the KB but was inferred again");
    } else if (!present && marked) {
      flag(v, Status::KBUpdateError, "'" + premise + "' is marked as already in KB but is absent");
    }
  }

  void check_fact(const TraceStep& step, StepVerdict& v) {
    const std::string& premise = step.produced.front();
    const Rule* rule = instance_.find_rule(step.rule_tag);
    if (rule == nullptr) {
      flag(v, Status::HallucinatedRule, "Rule" + std::to_string(step.rule_tag) + " does not exist");
    } else if (report_.semantic_checked) {
      if (!rule->is_fact()) {
        flag(v, Status::HallucinatedRule, "Rule" + std::to_string(step.rule_tag) + " is not a fact");
      } else {
        const auto lit = parse_premise(premise);
        if (!lit || !(*lit == rule->conclusion)) {
          flag(v, Status::HallucinatedRule,
               "Rule" + std::to_string(step.rule_tag) + " states '" + render(rule->conclusion) + "', not '" +
                   premise + "'");
        }
      }
    }
    check_repeat(premise, false, v);
    shadow_.admit(premise);
  }

  void check_infer(const TraceStep& step, StepVerdict& v) {
    const std::string tag = "Rule" + std::to_string(step.rule_tag);
    const Rule* rule = instance_.find_rule(step.rule_tag);
    if (rule == nullptr) {
      flag(v, Status::HallucinatedRule, tag + " does not exist");
    } else if (report_.semantic_checked) {
      check_application(*rule, tag, step, v);
    }
    for (const auto& p : step.produced) {
      check_repeat(p, step.already_in_kb, v);
      shadow_.admit(p);
    }
  }

  void check_application(const Rule& rule, const std::string& tag, const TraceStep& step, StepVerdict& v) {
    if (rule.is_fact()) {
      flag(v, Status::RuleMatchError, tag + " is a fact, not an inference rule");
      return;
    }
    std::vector<Literal> cited;
    for (const auto& c : step.cited_premises) {
      if (!shadow_.contains(c)) {
        flag(v, Status::RuleMatchError, "cited premise '" + c + "' is not in the KB");
        return;
      }
      if (auto lit = parse_premise(c)) cited.push_back(*lit);
    }
    for (const auto& p : step.produced) {
      const auto lit = parse_premise(p);
      if (!lit) {
        flag(v, Status::RuleMatchError, "cannot read inferred premise '" + p + "'");
        return;
      }
      if (!has_instantiation(rule, *lit, cited)) {
        flag(v, Status::RuleMatchError, tag + " ('" + rule.surface + "') does not yield '" + p +
                                            "' from the cited premises");
        return;
      }
    }
  }

  void check_snapshot(const TraceStep& step, StepVerdict& v) {
    std::set<std::string> listed;
    for (const auto& p : step.kb_contents) listed.insert(normalize_premise(p));
    if (listed != shadow_.keys()) flag(v, Status::KBUpdateError, describe_set_difference(shadow_.keys(), listed));
  }

  void check_validate() {
    report_.halted = trace_.validate.has_value() && !trace_.truncated;
    if (!trace_.validate) return;
    const TruthValue claimed = trace_.validate->answer;
    report_.final_answer_correct = Answer::truth(claimed) == instance_.gold;
    if (!report_.semantic_checked) {
      report_.validate_consistent = true;
      return;
    }
    report_.validate_consistent = check_validate_step(shadow_.kb(), *instance_.question.literal, claimed);
    if (!report_.validate_consistent) {
      report_.step_verdicts.push_back({trace_.steps.size(), Status::RuleMatchError,
                                       "Validate answer " + std::string(to_string(claimed)) +
                                           " does not follow from the KB"});
    }
  }

  void collect_classes() {
    for (const auto& v : report_.step_verdicts) {
      switch (v.status) {
        case Status::HallucinatedRule:
          report_.error_classes.push_back(ErrorClass::HallucinatedRule);
          break;
        case Status::RuleMatchError:
        case Status::KBUpdateError:
          report_.error_classes.push_back(ErrorClass::RuleMatchError);
          break;
        case Status::Valid:
        case Status::RedundantReinference:
          break;
      }
    }
    if (report_.cyclic) report_.error_classes.push_back(ErrorClass::CyclicInference);
    if (!report_.halted) report_.error_classes.push_back(ErrorClass::UnstoppableFlow);
  }

  const Instance& instance_;
  const Trace& trace_;
  ShadowKB shadow_;
  VerificationReport report_;
};

}  // namespace

std::string_view to_string(StepVerdict::Status s) {
  switch (s) {
    case Status::Valid:
      return "Valid";
    case Status::HallucinatedRule:
      return "HallucinatedRule";
    case Status::RuleMatchError:
      return "RuleMatchError";
    case Status::KBUpdateError:
      return "KBUpdateError";
    case Status::RedundantReinference:
      return "RedundantReinference";
  }
  return "Valid";
}

std::string_view to_string(ErrorClass c) {
  switch (c) {
    case ErrorClass::HallucinatedRule:
      return "HallucinatedRule";
    case ErrorClass::UnstoppableFlow:
      return "UnstoppableFlow";
    case ErrorClass::CyclicInference:
      return "CyclicInference";
    case ErrorClass::RuleMatchError:
      return "RuleMatchError";
  }
  return "RuleMatchError";
}

std::string_view label(ErrorClass c) {
  switch (c) {
    case ErrorClass::HallucinatedRule:
      return "Hallucinated Inference Rules";
    case ErrorClass::UnstoppableFlow:
      return "Unstoppable Inference Flow";
    case ErrorClass::CyclicInference:
      return "Failure on Cyclic Inference Graphs";
    case ErrorClass::RuleMatchError:
      return "Rule Matching Errors";
  }
  return "Rule Matching Errors";
}

std::size_t ErrorHistogram::total() const noexcept {
  std::size_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

ErrorHistogram& ErrorHistogram::operator+=(const ErrorHistogram& other) {
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  return *this;
}

VerificationReport verify_trace(const Instance& instance, const Trace& trace) {
  return Verifier(instance, trace).run();
}

bool check_validate_step(const KnowledgeBase& kb, const Literal& question, TruthValue claimed) {
  try {
    return answer_query(kb, question) == claimed;
  } catch (const AmbiguousAnswer&) {
    return false;
  }
}

ErrorHistogram classify_errors(const VerificationReport& report) {
  ErrorHistogram h;
  for (ErrorClass c : report.error_classes) ++h[c];
  return h;
}

}  // namespace sacot
