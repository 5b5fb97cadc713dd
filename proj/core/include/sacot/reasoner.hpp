#pragma once

// Deterministic forward-chaining oracle.

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sacot/answer.hpp"
#include "sacot/instance.hpp"
#include "sacot/rule_language.hpp"
#include "sacot/trace.hpp"

namespace sacot {

/// Insertion-ordered set of ground literals with derivation provenance.
class KnowledgeBase {
 public:
  struct Origin {
    int rule_tag = 0;
    /// Indices of earlier entries the derivation used; empty for facts.
    std::vector<std::size_t> cited;
  };

  /// Returns false (and changes nothing) if the literal is already present.
  bool insert(const Literal& literal, Origin origin);
  bool insert(const Literal& literal) { return insert(literal, Origin{}); }
  bool contains(const Literal& literal) const;
  std::optional<std::size_t> index_of(const Literal& literal) const;

  const std::vector<Literal>& entries() const noexcept { return entries_; }
  const Origin& origin(std::size_t index) const { return origins_.at(index); }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  /// Distinct constants (subjects and objects), sorted by name.
  std::vector<Term> constants() const;

 private:
  std::vector<Literal> entries_;
  std::vector<Origin> origins_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct Instantiation {
  int rule_tag = 0;
  /// Empty for ground rules.
  std::optional<Term> binding;
  /// KB literals satisfying each condition, in condition order.
  std::vector<Literal> matched;
  Literal conclusion;
};

/// Every binding under which all conditions of an implication are in the KB.
/// Negative conditions match only explicit negative literals. Ordered by
/// binding constant name.
std::vector<Instantiation> match_rule(const Rule& rule, const KnowledgeBase& kb);

struct Closure {
  KnowledgeBase kb;
  /// Literals l for which both l and negate(l) were derived.
  std::vector<Literal> contradictions;
};

/// Least fixpoint of rule application starting from the fact rules.
/// Throws OracleUnsolvable if the instance has opaque rules.
Closure forward_closure(const std::vector<Rule>& rules);
Closure forward_closure(const Instance& instance);

/// Open-world lookup. Throws AmbiguousAnswer when both q and not-q are present.
TruthValue answer_query(const KnowledgeBase& kb, const Literal& query);

struct Solution {
  TruthValue answer = TruthValue::Uncertain;
  Trace trace;
};

/// Question-seeded breadth-first derivation producing a canonical trace.
/// The returned answer is always answer_query over the full closure; the trace
/// stops as soon as the query is decided. Throws OracleUnsolvable for opaque or
/// multiple-choice instances and AmbiguousAnswer for contradictory closures.
Solution solve_with_trace(const Instance& instance);

}  // namespace sacot
