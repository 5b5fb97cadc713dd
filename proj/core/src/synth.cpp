#include "sacot/synth.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <string>
#include <string_view>

#include "sacot/error.hpp"
#include "sacot/reasoner.hpp"

namespace sacot {

namespace {

constexpr std::array<std::string_view, 8> kNames{"Anne", "Bob", "Charlie", "Dave", "Erin", "Fiona", "Gary", "Harry"};
constexpr std::array<std::string_view, 8> kAnimals{"the bear", "the cat",  "the cow",    "the dog",
                                                   "the lion", "the mouse", "the rabbit", "the squirrel"};
constexpr std::array<std::string_view, 14> kAttributes{"big",   "blue",  "cold",  "furry", "green", "kind",  "nice",
                                                       "quiet", "red",   "rough", "round", "smart", "white", "young"};
constexpr std::array<std::string_view, 6> kVerbs{"chase", "eat", "like", "need", "see", "visit"};

template <typename T>
std::size_t pick(std::mt19937_64& rng, const T& container) {
  return std::uniform_int_distribution<std::size_t>(0, container.size() - 1)(rng);
}

bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

struct Vocabulary {
  std::vector<Term> constants;
  std::vector<std::string> attributes;
  std::vector<std::string> verbs;  // empty for name-only theories
};

Vocabulary draw_vocabulary(std::mt19937_64& rng, const SynthConfig& config) {
  Vocabulary v;
  const bool animals = chance(rng, 0.5);
  const std::size_t max_c = std::max<std::size_t>(1, std::min<std::size_t>(config.max_constants, 8));
  const std::size_t n_constants = std::uniform_int_distribution<std::size_t>(1, max_c)(rng);
  std::vector<std::string_view> pool(animals ? kAnimals.begin() : kNames.begin(), animals ? kAnimals.end() : kNames.end());
  std::shuffle(pool.begin(), pool.end(), rng);
  for (std::size_t i = 0; i < n_constants; ++i) v.constants.push_back(Term::constant(pool[i]));

  std::vector<std::string_view> attrs(kAttributes.begin(), kAttributes.end());
  std::shuffle(attrs.begin(), attrs.end(), rng);
  const std::size_t n_attrs = std::uniform_int_distribution<std::size_t>(3, 7)(rng);
  for (std::size_t i = 0; i < n_attrs; ++i) v.attributes.emplace_back(attrs[i]);

  if (animals && n_constants > 1) {
    std::vector<std::string_view> verbs(kVerbs.begin(), kVerbs.end());
    std::shuffle(verbs.begin(), verbs.end(), rng);
    const std::size_t n_verbs = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    for (std::size_t i = 0; i < n_verbs; ++i) v.verbs.emplace_back(verbs[i]);
  }
  return v;
}

Literal random_literal(std::mt19937_64& rng, const Vocabulary& v, const Term& subject, double negation_rate) {
  Literal l;
  l.subject = subject;
  l.positive = !chance(rng, negation_rate);
  if (!v.verbs.empty() && chance(rng, 0.4)) {
    // Relation objects are constants other than the subject.
    std::vector<Term> objects;
    for (const auto& c : v.constants) {
      if (!(c == subject)) objects.push_back(c);
    }
    l.predicate = Predicate::relation(v.verbs[pick(rng, v.verbs)], objects[pick(rng, objects)]);
  } else {
    l.predicate = Predicate::attribute(v.attributes[pick(rng, v.attributes)]);
  }
  return l;
}

Rule random_implication(std::mt19937_64& rng, const Vocabulary& v, const SynthConfig& config) {
  Rule r;
  const bool ground = chance(rng, config.ground_rule_rate);
  const std::size_t n_conditions =
      std::uniform_int_distribution<std::size_t>(1, std::max<std::size_t>(1, config.max_conditions))(rng);
  auto subject = [&] { return ground ? v.constants[pick(rng, v.constants)] : Term::variable(); };
  for (int attempt = 0; attempt < 20 && r.conditions.size() < n_conditions; ++attempt) {
    Literal c = random_literal(rng, v, subject(), config.negation_rate);
    const bool duplicate = std::any_of(r.conditions.begin(), r.conditions.end(), [&](const Literal& o) {
      return o.subject == c.subject && o.predicate == c.predicate;
    });
    if (!duplicate) r.conditions.push_back(std::move(c));
  }
  for (int attempt = 0; attempt < 20; ++attempt) {
    Literal c = random_literal(rng, v, ground ? v.constants[pick(rng, v.constants)] : Term::variable(),
                               config.negation_rate);
    const bool clash = std::any_of(r.conditions.begin(), r.conditions.end(), [&](const Literal& o) {
      return o.subject == c.subject && o.predicate == c.predicate;
    });
    if (!clash) {
      r.conclusion = std::move(c);
      return r;
    }
  }
  r.conclusion = random_literal(rng, v, r.conditions.front().subject, config.negation_rate);
  r.conclusion.positive = !r.conditions.front().positive;
  r.conclusion.predicate = r.conditions.front().predicate;
  return r;
}

std::optional<TruthValue> safe_answer(const KnowledgeBase& kb, const Literal& q) {
  try {
    return answer_query(kb, q);
  } catch (const AmbiguousAnswer&) {
    return std::nullopt;
  }
}

std::optional<std::pair<Literal, TruthValue>> choose_query(std::mt19937_64& rng, const Vocabulary& v,
                                                           const KnowledgeBase& kb, TruthValue target,
                                                           const SynthConfig& config) {
  const auto& entries = kb.entries();
  std::vector<std::size_t> derived;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!kb.origin(i).cited.empty()) derived.push_back(i);
  }
  if (target != TruthValue::Uncertain && !entries.empty()) {
    for (int attempt = 0; attempt < 30; ++attempt) {
      const std::size_t i = (!derived.empty() && chance(rng, 0.75)) ? derived[pick(rng, derived)] : pick(rng, entries);
      Literal q = target == TruthValue::True ? entries[i] : negate(entries[i]);
      auto a = safe_answer(kb, q);
      if (a && *a == target) return std::make_pair(q, target);
    }
  }
  for (int attempt = 0; attempt < 60; ++attempt) {
    Literal q = random_literal(rng, v, v.constants[pick(rng, v.constants)], 0.5);
    auto a = safe_answer(kb, q);
    if (!a && config.skip_ambiguous) continue;
    if (a && *a == TruthValue::Uncertain) return std::make_pair(q, *a);
  }
  return std::nullopt;
}

}  // namespace

Instance generate_instance(std::mt19937_64& rng, const SynthConfig& config, std::size_t index) {
  char id[32];
  std::snprintf(id, sizeof id, "synth-%04zu", index);
  const TruthValue targets[] = {TruthValue::True, TruthValue::False, TruthValue::Uncertain};

  for (int attempt = 0; attempt < 200; ++attempt) {
    const Vocabulary v = draw_vocabulary(rng, config);
    const std::size_t max_rules = std::max<std::size_t>(2, config.max_rules);
    const std::size_t n_rules = std::uniform_int_distribution<std::size_t>(2, max_rules)(rng);
    const std::size_t n_facts = std::uniform_int_distribution<std::size_t>(1, std::max<std::size_t>(1, n_rules / 2))(rng);

    std::vector<Rule> rules;
    for (std::size_t i = 0; i < n_rules; ++i) {
      Rule r;
      if (i < n_facts) {
        r.conclusion = random_literal(rng, v, v.constants[pick(rng, v.constants)], config.negation_rate);
      } else {
        r = random_implication(rng, v, config);
      }
      const bool duplicate = std::any_of(rules.begin(), rules.end(), [&](const Rule& o) {
        return o.conditions == r.conditions && o.conclusion == r.conclusion;
      });
      if (!duplicate) rules.push_back(std::move(r));
    }
    // Facts lead most of the time, as in the benchmark theories.
    if (chance(rng, 0.3)) std::shuffle(rules.begin(), rules.end(), rng);

    std::string context;
    for (std::size_t i = 0; i < rules.size(); ++i) {
      rules[i].tag = static_cast<int>(i + 1);
      if (i > 0) context += ' ';
      context += render(rules[i]);
    }

    const Closure closure = forward_closure(rules);
    const TruthValue target = targets[index % 3];
    auto query = choose_query(rng, v, closure.kb, target, config);
    if (!query) continue;

    Instance inst = make_instance(id, Dataset::ProofWriter, context, render(query->first) + ".", {},
                                  Answer::truth(query->second));
    if (!inst.oracle_solvable() || inst.rules.size() != rules.size()) continue;
    return inst;
  }
  throw Error("could not generate instance " + std::string(id));
}

std::vector<Instance> generate_instances(std::size_t n, std::uint64_t seed, const SynthConfig& config) {
  std::mt19937_64 rng(seed);
  std::vector<Instance> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(generate_instance(rng, config, i));
  return out;
}

}  // namespace sacot
