#include "sacot/reasoner.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "sacot/error.hpp"

namespace sacot {

namespace {

bool mentions(const Literal& l, const Term& constant) {
  return l.subject == constant || (l.predicate.object && *l.predicate.object == constant);
}

bool conditions_have_variable(const Rule& rule) {
  return std::any_of(rule.conditions.begin(), rule.conditions.end(), [](const Literal& c) { return !c.is_ground(); });
}

std::vector<const Rule*> sorted_by_tag(const std::vector<Rule>& rules, bool implications) {
  std::vector<const Rule*> out;
  for (const auto& r : rules) {
    if (r.opaque) continue;
    if (implications != r.conditions.empty()) out.push_back(&r);
  }
  std::stable_sort(out.begin(), out.end(), [](const Rule* a, const Rule* b) { return a->tag < b->tag; });
  return out;
}

void add_constants(const Literal& l, std::map<std::string, Term>& out) {
  if (!l.subject.is_variable()) out.emplace(l.subject.name, l.subject);
  if (l.predicate.object && !l.predicate.object->is_variable()) {
    out.emplace(l.predicate.object->name, *l.predicate.object);
  }
}

}  // namespace

bool KnowledgeBase::insert(const Literal& literal, Origin origin) {
  auto [it, inserted] = index_.emplace(literal.key(), entries_.size());
  if (!inserted) return false;
  entries_.push_back(literal);
  origins_.push_back(std::move(origin));
  return true;
}

bool KnowledgeBase::contains(const Literal& literal) const { return index_.contains(literal.key()); }

std::optional<std::size_t> KnowledgeBase::index_of(const Literal& literal) const {
  auto it = index_.find(literal.key());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<Term> KnowledgeBase::constants() const {
  std::map<std::string, Term> seen;
  for (const auto& e : entries_) add_constants(e, seen);
  std::vector<Term> out;
  out.reserve(seen.size());
  for (auto& [name, term] : seen) out.push_back(term);
  return out;
}

std::vector<Instantiation> match_rule(const Rule& rule, const KnowledgeBase& kb) {
  std::vector<Instantiation> out;
  if (rule.opaque || rule.conditions.empty()) return out;

  auto try_binding = [&](const std::optional<Term>& binding) {
    Instantiation inst;
    inst.rule_tag = rule.tag;
    inst.binding = binding;
    for (const auto& cond : rule.conditions) {
      Literal ground = binding ? substitute(cond, *binding) : cond;
      if (!ground.is_ground() || !kb.contains(ground)) return;
      inst.matched.push_back(std::move(ground));
    }
    inst.conclusion = binding ? substitute(rule.conclusion, *binding) : rule.conclusion;
    if (!inst.conclusion.is_ground()) return;
    out.push_back(std::move(inst));
  };

  if (!conditions_have_variable(rule)) {
    try_binding(std::nullopt);
    return out;
  }
  for (const Term& c : kb.constants()) try_binding(c);
  return out;
}

Closure forward_closure(const std::vector<Rule>& rules) {
  if (std::any_of(rules.begin(), rules.end(), [](const Rule& r) { return r.opaque; })) {
    throw OracleUnsolvable("instance contains sentences outside the rule dialect");
  }
  Closure closure;
  KnowledgeBase& kb = closure.kb;
  std::set<std::string> contradicted;
  auto note_contradiction = [&](const Literal& l) {
    if (kb.contains(negate(l))) {
      const Literal positive = l.positive ? l : negate(l);
      if (contradicted.insert(positive.key()).second) closure.contradictions.push_back(positive);
    }
  };

  for (const Rule* fact : sorted_by_tag(rules, false)) {
    if (kb.insert(fact->conclusion, {fact->tag, {}})) note_contradiction(fact->conclusion);
  }
  const auto implications = sorted_by_tag(rules, true);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Rule* rule : implications) {
      for (auto& inst : match_rule(*rule, kb)) {
        KnowledgeBase::Origin origin{rule->tag, {}};
        for (const auto& m : inst.matched) origin.cited.push_back(*kb.index_of(m));
        if (kb.insert(inst.conclusion, std::move(origin))) {
          changed = true;
          note_contradiction(inst.conclusion);
        }
      }
    }
  }
  return closure;
}

Closure forward_closure(const Instance& instance) { return forward_closure(instance.rules); }

TruthValue answer_query(const KnowledgeBase& kb, const Literal& query) {
  const bool yes = kb.contains(query);
  const bool no = kb.contains(negate(query));
  if (yes && no) throw AmbiguousAnswer("both '" + render(query) + "' and its negation are entailed");
  if (yes) return TruthValue::True;
  if (no) return TruthValue::False;
  return TruthValue::Uncertain;
}

namespace {

class TraceBuilder {
 public:
  TraceBuilder(const Instance& instance, const Literal& query)
      : query_(query), negated_query_(negate(query)) {
    facts_ = sorted_by_tag(instance.rules, false);
    implications_ = sorted_by_tag(instance.rules, true);
    for (const Rule* f : facts_) {
      fact_by_key_.emplace(f->conclusion.key(), f);
      add_constants(f->conclusion, universe_);
    }
    for (const Rule* r : implications_) {
      for (const auto& c : r->conditions) add_constants(c, universe_);
      add_constants(r->conclusion, universe_);
    }
  }

  Trace run() {
    auto [subject, vp] = render_parts(query_);
    trace_.header_text = std::string(kTraceHeaderPrefix) + ": " + subject + ", " + vp;
    trace_.steps.push_back(TraceStep::snapshot({}));

    bool seeded = false;
    for (const Rule* f : facts_) {
      if (mentions(f->conclusion, query_.subject) && collect(*f)) seeded = true;
    }
    if (seeded) snapshot();

    std::size_t cursor = 0;
    while (!decided()) {
      while (cursor < kb_.size() && !decided()) {
        const Literal premise = kb_.entries()[cursor++];
        expand(premise);
      }
      if (decided()) break;
      // Facts that no rule has needed yet.
      bool admitted = false;
      for (const Rule* f : facts_) {
        if (collect(*f)) admitted = true;
      }
      if (!admitted) break;
      snapshot();
    }

    ValidateStep v;
    v.question_text = render(query_);
    if (kb_.contains(query_)) {
      v.cited_premise = render(query_);
    } else if (kb_.contains(negated_query_)) {
      v.cited_premise = render(negated_query_);
    } else if (!kb_.empty()) {
      v.cited_premise = render(kb_.entries().back());
    }
    v.answer = answer_query(kb_, query_);
    trace_.validate = v;
    return std::move(trace_);
  }

 private:
  bool decided() const { return kb_.contains(query_) || kb_.contains(negated_query_); }

  bool collect(const Rule& fact) {
    if (!kb_.insert(fact.conclusion, {fact.tag, {}})) return false;
    trace_.steps.push_back(TraceStep::fact_collect(fact.tag, render(fact.conclusion)));
    return true;
  }

  void snapshot() {
    std::vector<std::string> contents;
    contents.reserve(kb_.size());
    for (const auto& e : kb_.entries()) contents.push_back(render(e));
    trace_.steps.push_back(TraceStep::snapshot(std::move(contents)));
  }

  bool available(const Literal& l) const { return kb_.contains(l) || fact_by_key_.contains(l.key()); }

  // Fires every instantiation that uses `premise` as one of its conditions.
  void expand(const Literal& premise) {
    for (const Rule* rule : implications_) {
      for (const auto& binding : candidate_bindings(*rule, premise)) {
        std::vector<Literal> conditions;
        bool uses_premise = false;
        bool satisfiable = true;
        for (const auto& c : rule->conditions) {
          Literal g = binding ? substitute(c, *binding) : c;
          if (!g.is_ground() || !available(g)) {
            satisfiable = false;
            break;
          }
          uses_premise = uses_premise || g == premise;
          conditions.push_back(std::move(g));
        }
        if (!satisfiable || !uses_premise) continue;

        bool admitted = false;
        for (const auto& c : conditions) {
          if (!kb_.contains(c) && collect(*fact_by_key_.at(c.key()))) admitted = true;
        }
        if (admitted) snapshot();

        const Literal conclusion = binding ? substitute(rule->conclusion, *binding) : rule->conclusion;
        if (!conclusion.is_ground()) continue;
        std::vector<std::string> cited;
        KnowledgeBase::Origin origin{rule->tag, {}};
        for (const auto& c : conditions) {
          cited.push_back(render(c));
          origin.cited.push_back(*kb_.index_of(c));
        }
        if (kb_.contains(conclusion)) {
          if (marked_.insert(conclusion.key()).second) {
            trace_.steps.push_back(TraceStep::infer(rule->tag, std::move(cited), render(conclusion), true));
            snapshot();
          }
          continue;
        }
        kb_.insert(conclusion, std::move(origin));
        trace_.steps.push_back(TraceStep::infer(rule->tag, std::move(cited), render(conclusion)));
        snapshot();
        if (decided()) return;
      }
    }
  }

  std::vector<std::optional<Term>> candidate_bindings(const Rule& rule, const Literal& premise) const {
    if (!conditions_have_variable(rule)) return {std::nullopt};
    std::map<std::string, Term> constants;
    const bool ground_condition_matches =
        std::any_of(rule.conditions.begin(), rule.conditions.end(),
                    [&](const Literal& c) { return c.is_ground() && c == premise; });
    if (ground_condition_matches) {
      constants = universe_;
    } else {
      add_constants(premise, constants);
    }
    std::vector<std::optional<Term>> out;
    for (auto& [name, term] : constants) out.emplace_back(term);
    return out;
  }

  Literal query_;
  Literal negated_query_;
  std::vector<const Rule*> facts_;
  std::vector<const Rule*> implications_;
  std::unordered_map<std::string, const Rule*> fact_by_key_;
  std::map<std::string, Term> universe_;
  KnowledgeBase kb_;
  std::set<std::string> marked_;
  Trace trace_;
};

}  // namespace

Solution solve_with_trace(const Instance& instance) {
  if (!instance.oracle_solvable()) {
    throw OracleUnsolvable("instance " + instance.id + " is not a parsed statement query over dialect rules");
  }
  const Literal& query = *instance.question.literal;
  const Closure closure = forward_closure(instance.rules);
  Solution solution;
  solution.answer = answer_query(closure.kb, query);
  solution.trace = TraceBuilder(instance, query).run();
  return solution;
}

}  // namespace sacot
