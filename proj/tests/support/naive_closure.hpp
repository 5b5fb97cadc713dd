#pragma once

// Deliberately simple fixpoint used as a reference for the reasoner: string
// keys, full re-scan every round, no indexing and no shared code with the
// library beyond the parsed rule structures.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sacot/rule_language.hpp"

namespace sacot::fixtures {

struct NaiveAtom {
  bool positive;
  std::string predicate;
  std::string subject;  // "?" for the variable
  std::string object;   // empty for attributes, "?" for the variable

  std::string ground_key(const std::string& value) const {
    const std::string s = subject == "?" ? value : subject;
    const std::string o = object == "?" ? value : object;
    return std::string(positive ? "+" : "-") + predicate + "|" + s + "|" + o;
  }
};

inline NaiveAtom naive_atom(const Literal& l) {
  NaiveAtom a;
  a.positive = l.positive;
  a.predicate = (l.predicate.kind == Predicate::Kind::Relation ? "r:" : "a:") + l.predicate.name;
  a.subject = l.subject.kind == Term::Kind::Variable ? "?" : l.subject.name;
  if (l.predicate.object) a.object = l.predicate.object->kind == Term::Kind::Variable ? "?" : l.predicate.object->name;
  return a;
}

struct NaiveResult {
  std::set<std::string> facts;

  /// 'T', 'F', 'U', or 'A' (both q and not-q derivable).
  char answer(const Literal& q) const {
    NaiveAtom a = naive_atom(q);
    const bool yes = facts.count(a.ground_key("")) > 0;
    a.positive = !a.positive;
    const bool no = facts.count(a.ground_key("")) > 0;
    if (yes && no) return 'A';
    if (yes) return 'T';
    if (no) return 'F';
    return 'U';
  }
};

inline NaiveResult naive_closure(const std::vector<Rule>& rules) {
  std::set<std::string> constants;
  struct NaiveRule {
    std::vector<NaiveAtom> conditions;
    NaiveAtom conclusion;
  };
  std::vector<NaiveRule> compiled;
  NaiveResult result;
  for (const auto& r : rules) {
    NaiveRule nr{{}, naive_atom(r.conclusion)};
    for (const auto& c : r.conditions) nr.conditions.push_back(naive_atom(c));
    for (const auto* a : {&nr.conclusion}) {
      if (a->subject != "?") constants.insert(a->subject);
      if (!a->object.empty() && a->object != "?") constants.insert(a->object);
    }
    for (const auto& a : nr.conditions) {
      if (a.subject != "?") constants.insert(a.subject);
      if (!a.object.empty() && a.object != "?") constants.insert(a.object);
    }
    if (nr.conditions.empty()) {
      result.facts.insert(nr.conclusion.ground_key(""));
    } else {
      compiled.push_back(std::move(nr));
    }
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : compiled) {
      for (const auto& value : constants) {
        bool all = true;
        for (const auto& c : r.conditions) {
          if (!result.facts.count(c.ground_key(value))) {
            all = false;
            break;
          }
        }
        if (all && result.facts.insert(r.conclusion.ground_key(value)).second) changed = true;
      }
    }
  }
  return result;
}

}  // namespace sacot::fixtures
