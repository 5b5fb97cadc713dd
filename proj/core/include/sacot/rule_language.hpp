#pragma once

// Constrained natural-language dialect of ProofWriter / ProntoQA contexts.
//
// Sentences such as "Erin is not furry.", "The squirrel likes the cow.",
// "If something is blue then it is rough.", "All cold things are big." or
// "Every tumpus is a wumpus." are parsed into tagged rules over signed
// literals. Every rule uses at most one variable; "something", "someone",
// "it" and "they" all denote it.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sacot {

/// A constant (an entity such as "Erin" or "the cow") or the rule variable.
struct Term {
  enum class Kind { Constant, Variable };

  Kind kind = Kind::Constant;
  /// Lower-cased, article-free identity ("erin", "cow", "bald eagle"); "x" for the variable.
  std::string name;
  /// Surface form used for rendering ("Erin", "the cow"). Not part of equality.
  std::string surface;

  static Term constant(std::string_view surface_form);
  static Term variable();

  bool is_variable() const noexcept { return kind == Kind::Variable; }

  friend bool operator==(const Term& a, const Term& b) { return a.kind == b.kind && a.name == b.name; }
};

struct Predicate {
  enum class Kind { Attribute, Relation };

  Kind kind = Kind::Attribute;
  /// Lemma: "rough", "tumpus", "like", "visit".
  std::string name;
  /// Relations only.
  std::optional<Term> object;
  /// Category nouns render as "is a tumpus" rather than "is tumpus". Not part of equality.
  bool noun = false;

  static Predicate attribute(std::string_view name, bool noun = false);
  static Predicate relation(std::string_view verb_lemma, Term object);

  friend bool operator==(const Predicate& a, const Predicate& b) {
    return a.kind == b.kind && a.name == b.name && a.object == b.object;
  }
};

struct Literal {
  Term subject;
  Predicate predicate;
  bool positive = true;

  bool is_ground() const noexcept;
  /// Canonical identity string, e.g. "-quiet(erin)" or "+like(squirrel,cow)".
  std::string key() const;

  friend bool operator==(const Literal& a, const Literal& b) {
    return a.positive == b.positive && a.subject == b.subject && a.predicate == b.predicate;
  }
};

Literal negate(const Literal& l);

/// Replaces the rule variable by `value` wherever it occurs.
Literal substitute(const Literal& l, const Term& value);

/// One tagged context sentence: a ground fact (no conditions) or an implication.
/// Sentences outside the dialect are kept as opaque rules that only carry text.
struct Rule {
  int tag = 0;
  std::vector<Literal> conditions;
  Literal conclusion;
  std::string surface;
  bool opaque = false;

  bool is_fact() const noexcept { return !opaque && conditions.empty(); }
  bool has_variable() const noexcept;

  /// Structural equality: tag, conditions, conclusion and opacity. Surface text is ignored.
  friend bool operator==(const Rule& a, const Rule& b) {
    return a.tag == b.tag && a.opaque == b.opaque && a.conditions == b.conditions &&
           a.conclusion == b.conclusion;
  }
};

struct Question {
  enum class Kind { Statement, MultipleChoice };

  Kind kind = Kind::Statement;
  /// Original question string.
  std::string text;
  /// The statement after any boilerplate prefix ("Erin is not quiet").
  std::string statement;
  /// Present for statement queries.
  std::optional<Literal> literal;
  /// Option texts for multiple choice, in letter order.
  std::vector<std::string> options;
};

/// Parses one sentence. Throws UnparsedSentence outside the dialect.
Rule parse_sentence(std::string_view text, int tag);

struct ContextParse {
  std::vector<Rule> rules;
  /// One entry per sentence that fell back to an opaque rule, plus an
  /// "EmptyContext" warning for blank input.
  std::vector<std::string> warnings;

  bool fully_parsed() const noexcept;
};

/// Splits on terminal punctuation and newlines; sentences are tagged 1..N.
std::vector<std::string> split_sentences(std::string_view text);
ContextParse parse_context(std::string_view text);

/// Strips the "Based on the above information, ..." prefix and parses the
/// statement. Questions carrying options (given, or inline "A) ... B) ...")
/// are multiple choice. Throws UnparsedQuestion for an unparseable statement.
Question parse_question(std::string_view text, std::vector<std::string> options = {});

/// Tolerant single-literal parse for premises quoted in traces: articles may
/// be dropped ("squirrel likes cow") and a trailing period is optional.
std::optional<Literal> parse_premise(std::string_view text);

/// Canonical sentence, with final period.
std::string render(const Rule& rule);
/// Canonical clause, without final period ("Erin is quiet").
std::string render(const Literal& literal);
/// Splits a rendered literal into its subject and verb-phrase parts:
/// ("The squirrel", "does not visit the mouse").
std::pair<std::string, std::string> render_parts(const Literal& literal);

}  // namespace sacot
