#include "sacot/rule_language.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <span>

#include "sacot/error.hpp"

namespace sacot {

namespace {

struct Token {
  std::string text;
  std::string lower;
};

using Tokens = std::vector<Token>;
using TokenSpan = std::span<const Token>;

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_word(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalpha(c) || c == '-' || c == '\'';
  });
}

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      out.push_back({current, to_lower(current)});
      current.clear();
    }
  };
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else if (c == ',' || c == ';') {
      flush();
      out.push_back({",", ","});
    } else {
      current.push_back(c);
    }
  }
  flush();
  return out;
}

std::string_view strip_terminal(std::string_view s) {
  s = trim(s);
  while (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == '?')) {
    s.remove_suffix(1);
    s = trim(s);
  }
  return s;
}

bool is_pronoun(std::string_view lower) {
  return lower == "something" || lower == "someone" || lower == "somebody" || lower == "it" ||
         lower == "they" || lower == "them";
}

bool is_function_word(std::string_view lower) {
  return lower == "is" || lower == "are" || lower == "not" || lower == "and" || lower == "then" ||
         lower == "if" || lower == "does" || lower == "do" || lower == "," || lower == "the";
}

std::string join(TokenSpan toks, bool lowered) {
  std::string out;
  for (const auto& t : toks) {
    if (!out.empty()) out.push_back(' ');
    out += lowered ? t.lower : t.text;
  }
  return out;
}

std::string verb_lemma(std::string_view word) {
  std::string w = to_lower(word);
  if (ends_with(w, "sses") || ends_with(w, "shes") || ends_with(w, "ches") || ends_with(w, "xes") ||
      ends_with(w, "zzes")) {
    w.resize(w.size() - 2);
  } else if (ends_with(w, "s") && !ends_with(w, "ss")) {
    w.pop_back();
  }
  return w;
}

std::string inflect(std::string_view lemma) {
  std::string w(lemma);
  if (ends_with(w, "s") || ends_with(w, "sh") || ends_with(w, "ch") || ends_with(w, "x") || ends_with(w, "z")) {
    return w + "es";
  }
  return w + "s";
}

bool looks_plural_noun(std::string_view lower) {
  return lower.size() > 2 && ends_with(lower, "s") && !ends_with(lower, "ss") && !ends_with(lower, "ous");
}

std::string singularize(std::string_view lower) {
  std::string w(lower);
  if (ends_with(w, "uses") || ends_with(w, "sses") || ends_with(w, "xes") || ends_with(w, "ches") ||
      ends_with(w, "shes")) {
    w.resize(w.size() - 2);
  } else if (ends_with(w, "ies")) {
    w.resize(w.size() - 3);
    w += "y";
  } else if (ends_with(w, "s")) {
    w.pop_back();
  }
  return w;
}

bool is_sort_word(std::string_view lower) {
  return lower == "things" || lower == "people" || lower == "ones" || lower == "persons" ||
         lower == "thing" || lower == "person" || lower == "one";
}

// Noun phrase: pronoun, "the <words>", a capitalised name, or (tolerant) bare words.
std::optional<Term> parse_np(TokenSpan toks, bool tolerant) {
  if (toks.empty()) return std::nullopt;
  if (toks.size() == 1 && is_pronoun(toks[0].lower)) return Term::variable();
  for (const auto& t : toks) {
    if (!is_word(t.text) || (t.lower != "the" && is_function_word(t.lower)) || is_pronoun(t.lower)) {
      return std::nullopt;
    }
  }
  if (toks[0].lower == "the") {
    if (toks.size() == 1) return std::nullopt;
    if (std::any_of(toks.begin() + 1, toks.end(), [](const Token& t) { return t.lower == "the"; })) {
      return std::nullopt;
    }
    return Term::constant("the " + join(toks.subspan(1), true));
  }
  if (std::any_of(toks.begin(), toks.end(), [](const Token& t) { return t.lower == "the"; })) {
    return std::nullopt;
  }
  const bool capitalised = std::all_of(toks.begin(), toks.end(), [](const Token& t) {
    return std::isupper(static_cast<unsigned char>(t.text[0]));
  });
  if (tolerant || capitalised) {
    return Term::constant(join(toks, false));
  }
  return std::nullopt;
}

std::optional<Predicate> parse_attribute_phrase(TokenSpan toks, bool& negated) {
  negated = false;
  std::size_t i = 0;
  if (i < toks.size() && toks[i].lower == "not") {
    negated = true;
    ++i;
  }
  bool noun = false;
  if (i < toks.size() && (toks[i].lower == "a" || toks[i].lower == "an")) {
    noun = true;
    ++i;
  }
  if (i >= toks.size()) return std::nullopt;
  const auto rest = toks.subspan(i);
  for (const auto& t : rest) {
    if (!is_word(t.text) || is_function_word(t.lower) || is_pronoun(t.lower)) return std::nullopt;
  }
  return Predicate::attribute(join(rest, true), noun);
}

std::size_t find_token(TokenSpan toks, std::string_view lower, std::size_t from = 0) {
  for (std::size_t i = from; i < toks.size(); ++i) {
    if (toks[i].lower == lower) return i;
  }
  return toks.size();
}

// One clause: "<np> is [not] [a] <attr>", "<np> does not <verb> <np>", "<np> <verb>s <np>".
std::optional<Literal> parse_clause(TokenSpan toks, bool tolerant) {
  if (toks.size() < 2) return std::nullopt;

  for (std::size_t i = 1; i < toks.size(); ++i) {
    if (toks[i].lower == "is" || toks[i].lower == "are") {
      auto subject = parse_np(toks.first(i), tolerant);
      if (!subject) return std::nullopt;
      // Plural copula only with the pronoun "they"; "Tumpuses are ..." is a generic.
      if (toks[i].lower == "are" && !subject->is_variable()) return std::nullopt;
      bool negated = false;
      auto pred = parse_attribute_phrase(toks.subspan(i + 1), negated);
      if (!pred) return std::nullopt;
      return Literal{*subject, *pred, !negated};
    }
  }

  for (std::size_t i = 1; i + 1 < toks.size(); ++i) {
    if ((toks[i].lower == "does" || toks[i].lower == "do") && toks[i + 1].lower == "not") {
      if (i + 3 >= toks.size()) return std::nullopt;
      auto subject = parse_np(toks.first(i), tolerant);
      if (!subject) return std::nullopt;
      const auto& verb = toks[i + 2];
      if (!is_word(verb.text) || is_function_word(verb.lower)) return std::nullopt;
      auto object = parse_np(toks.subspan(i + 3), tolerant);
      if (!object) return std::nullopt;
      return Literal{*subject, Predicate::relation(verb.lower, *object), false};
    }
  }

  // Affirmative relation: locate the verb.
  std::size_t verb = toks.size();
  bool plural_subject = false;
  if (is_pronoun(toks[0].lower)) {
    verb = 1;
    plural_subject = toks[0].lower == "they";
  } else if (toks[0].lower == "the") {
    const std::size_t next_the = find_token(toks, "the", 2);
    if (next_the < toks.size()) {
      verb = next_the - 1;
    } else {
      for (std::size_t i = 2; i < toks.size(); ++i) {
        if (ends_with(toks[i].lower, "s")) {
          verb = i;
          break;
        }
      }
    }
  } else {
    for (std::size_t i = 1; i < toks.size(); ++i) {
      if (ends_with(toks[i].lower, "s") && !is_function_word(toks[i].lower)) {
        verb = i;
        break;
      }
    }
  }
  if (verb == 0 || verb + 1 >= toks.size()) return std::nullopt;
  const auto& vt = toks[verb];
  if (!is_word(vt.text) || is_function_word(vt.lower) || is_pronoun(vt.lower)) return std::nullopt;
  if (!plural_subject && !ends_with(vt.lower, "s")) return std::nullopt;
  auto subject = parse_np(toks.first(verb), tolerant);
  auto object = parse_np(toks.subspan(verb + 1), tolerant);
  if (!subject || !object) return std::nullopt;
  const std::string lemma = plural_subject ? vt.lower : verb_lemma(vt.lower);
  return Literal{*subject, Predicate::relation(lemma, *object), true};
}

std::vector<TokenSpan> split_on_conjunctions(TokenSpan toks) {
  std::vector<TokenSpan> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= toks.size(); ++i) {
    if (i == toks.size() || toks[i].lower == "and" || toks[i].lower == ",") {
      if (i > start) parts.push_back(toks.subspan(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

bool literal_has_variable(const Literal& l) {
  return l.subject.is_variable() || (l.predicate.object && l.predicate.object->is_variable());
}

// "If <cond> [and <cond>]* then <concl>"
Rule parse_conditional(const Tokens& toks, std::string_view text, int tag) {
  const TokenSpan all(toks);
  const std::size_t then = find_token(all, "then", 1);
  if (then >= toks.size() - 1) throw UnparsedSentence(std::string(text), tag);

  Rule rule;
  rule.tag = tag;
  rule.surface = std::string(trim(text));

  std::optional<Literal> previous;
  Tokens prev_subject;
  for (TokenSpan part : split_on_conjunctions(all.subspan(1, then - 1))) {
    auto lit = parse_clause(part, false);
    if (!lit && previous) {
      // Elided subject: "someone is smart and nice", "something likes the cat and visits the dog".
      Tokens with_subject = prev_subject;
      if (previous->predicate.kind == Predicate::Kind::Attribute) with_subject.push_back({"is", "is"});
      with_subject.insert(with_subject.end(), part.begin(), part.end());
      lit = parse_clause(with_subject, false);
      if (!lit && previous->predicate.kind == Predicate::Kind::Relation) {
        Tokens copula = prev_subject;
        copula.push_back({"is", "is"});
        copula.insert(copula.end(), part.begin(), part.end());
        lit = parse_clause(copula, false);
      }
    }
    if (!lit) throw UnparsedSentence(std::string(text), tag);
    if (!previous || !(lit->subject == previous->subject)) {
      prev_subject.clear();
      if (lit->subject.is_variable()) {
        prev_subject.push_back({"it", "it"});
      } else {
        prev_subject = tokenize(lit->subject.surface);
      }
    }
    previous = lit;
    rule.conditions.push_back(*lit);
  }
  if (rule.conditions.empty()) throw UnparsedSentence(std::string(text), tag);

  const auto concl_toks = all.subspan(then + 1);
  auto conclusion = parse_clause(concl_toks, false);
  if (!conclusion) throw UnparsedSentence(std::string(text), tag);

  const bool conditions_bind = std::any_of(rule.conditions.begin(), rule.conditions.end(), literal_has_variable);
  if (literal_has_variable(*conclusion) && !conditions_bind) {
    // "If the cow is big then it is red": the pronoun refers to the first condition's subject.
    *conclusion = substitute(*conclusion, rule.conditions.front().subject);
  }
  rule.conclusion = *conclusion;
  return rule;
}

// "All red things are rough", "Every tumpus is a wumpus", "Big, young people are cold",
// "Tumpuses are not fruity".
std::optional<Rule> parse_generic(const Tokens& toks, std::string_view text, int tag) {
  const TokenSpan all(toks);
  std::size_t start = 0;
  bool singular = false;
  if (!toks.empty() && (toks[0].lower == "all" || toks[0].lower == "every" || toks[0].lower == "each")) {
    singular = toks[0].lower != "all";
    start = 1;
  }
  std::size_t copula = toks.size();
  for (std::size_t i = start + 1; i < toks.size(); ++i) {
    if (toks[i].lower == "is" || toks[i].lower == "are") {
      copula = i;
      break;
    }
  }
  if (copula >= toks.size()) return std::nullopt;
  if (toks[copula].lower == "is" && !singular) return std::nullopt;

  std::vector<std::string> words;
  for (const auto& t : all.subspan(start, copula - start)) {
    if (t.lower == "," || t.lower == "and") continue;
    if (!is_word(t.text) || is_function_word(t.lower) || is_pronoun(t.lower)) return std::nullopt;
    words.push_back(t.lower);
  }
  if (words.empty()) return std::nullopt;
  // Names and definite descriptions are not generics.
  if (start == 0 && std::isupper(static_cast<unsigned char>(toks[0].text[0])) && words.size() == 1 &&
      !looks_plural_noun(words[0])) {
    return std::nullopt;
  }

  Rule rule;
  rule.tag = tag;
  rule.surface = std::string(trim(text));
  const Term x = Term::variable();

  const std::string head = words.back();
  std::size_t adjective_count = words.size();
  if (is_sort_word(head)) {
    adjective_count = words.size() - 1;
    if (adjective_count == 0) return std::nullopt;
  } else if (singular || looks_plural_noun(head)) {
    adjective_count = words.size() - 1;
  } else {
    return std::nullopt;
  }
  for (std::size_t i = 0; i < adjective_count; ++i) {
    rule.conditions.push_back(Literal{x, Predicate::attribute(words[i]), true});
  }
  if (!is_sort_word(head)) {
    const std::string noun = singular ? head : singularize(head);
    rule.conditions.push_back(Literal{x, Predicate::attribute(noun, true), true});
  }

  bool negated = false;
  const auto rest = all.subspan(copula + 1);
  auto pred = parse_attribute_phrase(rest, negated);
  if (!pred) return std::nullopt;
  if (toks[copula].lower == "are" && !pred->noun && pred->name.find(' ') == std::string::npos &&
      looks_plural_noun(pred->name)) {
    pred = Predicate::attribute(singularize(pred->name), true);
  }
  rule.conclusion = Literal{x, *pred, !negated};
  return rule;
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string term_text(const Term& t, std::string_view variable_word) {
  if (t.is_variable()) return std::string(variable_word);
  return t.surface;
}

std::string verb_phrase(const Literal& l, std::string_view variable_word) {
  const Predicate& p = l.predicate;
  std::string out;
  if (p.kind == Predicate::Kind::Attribute) {
    out = l.positive ? "is " : "is not ";
    if (p.noun) {
      const bool vowel = !p.name.empty() && std::string_view("aeiou").find(p.name[0]) != std::string_view::npos;
      out += vowel ? "an " : "a ";
    }
    out += p.name;
    return out;
  }
  const std::string object = p.object ? term_text(*p.object, variable_word) : std::string();
  if (l.positive) return inflect(p.name) + " " + object;
  return "does not " + p.name + " " + object;
}

// Renders a clause inside a rule; the first mention of the variable reads "something".
std::string render_clause(const Literal& l, bool& variable_introduced) {
  const char* subject_word = variable_introduced ? "it" : "something";
  if (l.subject.is_variable()) variable_introduced = true;
  std::string subject = term_text(l.subject, subject_word);
  const char* object_word = variable_introduced ? "it" : "something";
  if (l.predicate.object && l.predicate.object->is_variable()) variable_introduced = true;
  return subject + " " + verb_phrase(l, object_word);
}

}  // namespace

Term Term::constant(std::string_view surface_form) {
  Term t;
  t.kind = Kind::Constant;
  std::string surface(trim(surface_form));
  std::string lowered = to_lower(surface);
  if (lowered.rfind("the ", 0) == 0) {
    lowered = lowered.substr(4);
    surface = "the " + surface.substr(4);
    // Definite descriptions are common nouns; keep them lower-case.
    surface = to_lower(surface);
  }
  t.name = lowered;
  t.surface = surface;
  return t;
}

Term Term::variable() {
  Term t;
  t.kind = Kind::Variable;
  t.name = "x";
  t.surface = "something";
  return t;
}

Predicate Predicate::attribute(std::string_view name, bool noun) {
  Predicate p;
  p.kind = Kind::Attribute;
  p.name = to_lower(name);
  p.noun = noun;
  return p;
}

Predicate Predicate::relation(std::string_view verb_lemma, Term object) {
  Predicate p;
  p.kind = Kind::Relation;
  p.name = to_lower(verb_lemma);
  p.object = std::move(object);
  return p;
}

bool Literal::is_ground() const noexcept { return !literal_has_variable(*this); }

std::string Literal::key() const {
  std::string k(1, positive ? '+' : '-');
  k += predicate.name;
  k += '(';
  k += subject.is_variable() ? "?x" : subject.name;
  if (predicate.object) {
    k += ',';
    k += predicate.object->is_variable() ? "?x" : predicate.object->name;
  }
  k += ')';
  return k;
}

Literal negate(const Literal& l) {
  Literal out = l;
  out.positive = !l.positive;
  return out;
}

Literal substitute(const Literal& l, const Term& value) {
  Literal out = l;
  if (out.subject.is_variable()) out.subject = value;
  if (out.predicate.object && out.predicate.object->is_variable()) out.predicate.object = value;
  return out;
}

bool Rule::has_variable() const noexcept {
  return literal_has_variable(conclusion) ||
         std::any_of(conditions.begin(), conditions.end(), literal_has_variable);
}

bool ContextParse::fully_parsed() const noexcept {
  return std::none_of(rules.begin(), rules.end(), [](const Rule& r) { return r.opaque; });
}

Rule parse_sentence(std::string_view text, int tag) {
  const std::string_view body = strip_terminal(text);
  const Tokens toks = tokenize(body);
  if (toks.empty()) throw UnparsedSentence(std::string(text), tag);

  if (toks[0].lower == "if") return parse_conditional(toks, text, tag);

  if (auto fact = parse_clause(toks, false); fact && fact->is_ground()) {
    Rule rule;
    rule.tag = tag;
    rule.conclusion = *fact;
    rule.surface = std::string(trim(text));
    return rule;
  }
  if (auto generic = parse_generic(toks, text, tag)) return *generic;
  throw UnparsedSentence(std::string(text), tag);
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    auto t = trim(current);
    if (!t.empty()) out.emplace_back(t);
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n' || c == '\r') {
      flush();
      continue;
    }
    current.push_back(c);
    if (c == '.' || c == '!' || c == '?') {
      const bool boundary = i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1]));
      if (boundary) flush();
    }
  }
  flush();
  return out;
}

ContextParse parse_context(std::string_view text) {
  ContextParse result;
  const auto sentences = split_sentences(text);
  if (sentences.empty()) {
    result.warnings.push_back("EmptyContext");
    return result;
  }
  int tag = 0;
  for (const auto& sentence : sentences) {
    ++tag;
    try {
      result.rules.push_back(parse_sentence(sentence, tag));
    } catch (const UnparsedSentence& e) {
      Rule opaque;
      opaque.tag = tag;
      opaque.surface = sentence;
      opaque.opaque = true;
      result.rules.push_back(std::move(opaque));
      result.warnings.push_back(e.what());
    }
  }
  return result;
}

Question parse_question(std::string_view text, std::vector<std::string> options) {
  Question q;
  q.text = std::string(trim(text));
  std::string body = q.text;

  if (options.empty()) {
    static const std::regex option_marker(R"((^|\s)\(?([A-G])\)\s*)");
    std::vector<std::pair<std::size_t, std::size_t>> marks;  // (match start, content start)
    for (auto it = std::sregex_iterator(body.begin(), body.end(), option_marker); it != std::sregex_iterator(); ++it) {
      marks.emplace_back(static_cast<std::size_t>(it->position(0)),
                         static_cast<std::size_t>(it->position(0) + it->length(0)));
    }
    if (marks.size() >= 2) {
      for (std::size_t i = 0; i < marks.size(); ++i) {
        const std::size_t end = i + 1 < marks.size() ? marks[i + 1].first : body.size();
        options.emplace_back(trim(std::string_view(body).substr(marks[i].second, end - marks[i].second)));
      }
      body = std::string(trim(std::string_view(body).substr(0, marks.front().first)));
    }
  }
  if (!options.empty()) {
    q.kind = Question::Kind::MultipleChoice;
    q.options = std::move(options);
    q.statement = body;
    return q;
  }

  std::string_view statement = body;
  if (const auto mark = statement.rfind('?'); mark != std::string_view::npos) {
    const auto after = trim(statement.substr(mark + 1));
    if (!after.empty()) statement = after;
  }
  // Drop a leading "Q:" or "Question:" label.
  if (const auto colon = statement.find(':'); colon != std::string_view::npos && colon < 12) {
    statement = trim(statement.substr(colon + 1));
  }
  q.statement = std::string(strip_terminal(statement));
  const Tokens toks = tokenize(q.statement);
  auto lit = parse_clause(toks, false);
  if (!lit || !lit->is_ground()) throw UnparsedQuestion(q.text);
  q.literal = *lit;
  return q;
}

std::optional<Literal> parse_premise(std::string_view text) {
  std::string_view s = trim(text);
  auto is_quote = [](char c) { return c == '`' || c == '\'' || c == '"'; };
  while (!s.empty() && is_quote(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_quote(s.back())) s.remove_suffix(1);
  s = strip_terminal(s);
  const Tokens toks = tokenize(s);
  if (toks.empty()) return std::nullopt;
  auto lit = parse_clause(toks, false);
  if (!lit) lit = parse_clause(toks, true);
  if (!lit || !lit->is_ground()) return std::nullopt;
  return lit;
}

std::string render(const Literal& literal) {
  auto [subject, vp] = render_parts(literal);
  return subject + " " + vp;
}

std::pair<std::string, std::string> render_parts(const Literal& literal) {
  return {capitalize(term_text(literal.subject, "something")), verb_phrase(literal, "it")};
}

std::string render(const Rule& rule) {
  if (rule.opaque) return rule.surface;
  if (rule.conditions.empty()) return render(rule.conclusion) + ".";
  bool introduced = false;
  std::string out = "If ";
  for (std::size_t i = 0; i < rule.conditions.size(); ++i) {
    if (i > 0) out += " and ";
    out += render_clause(rule.conditions[i], introduced);
  }
  out += " then ";
  out += render_clause(rule.conclusion, introduced);
  out += ".";
  return out;
}

}  // namespace sacot
