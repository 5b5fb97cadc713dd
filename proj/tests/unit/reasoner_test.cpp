#include <gtest/gtest.h>

#include <set>

#include "appendix_corpus.hpp"
#include "naive_closure.hpp"
#include "sacot/error.hpp"
#include "sacot/reasoner.hpp"
#include "sacot/synth.hpp"

using namespace sacot;

namespace {

Literal lit(const char* text) {
  auto l = parse_premise(text);
  EXPECT_TRUE(l.has_value()) << text;
  return *l;
}

Instance from_text(const char* context, const char* question, TruthValue gold = TruthValue::Uncertain) {
  return make_instance("t", Dataset::ProofWriter, context, question, {}, Answer::truth(gold));
}

}  // namespace

TEST(KnowledgeBase, InsertionOrderedSet) {
  KnowledgeBase kb;
  EXPECT_TRUE(kb.insert(lit("Erin is red")));
  EXPECT_TRUE(kb.insert(lit("Erin is big"), {14, {0}}));
  EXPECT_FALSE(kb.insert(lit("erin is red")));
  ASSERT_EQ(kb.size(), 2u);
  EXPECT_EQ(kb.entries()[1], lit("Erin is big"));
  EXPECT_EQ(kb.origin(1).rule_tag, 14);
  EXPECT_EQ(*kb.index_of(lit("Erin is big")), 1u);
  EXPECT_FALSE(kb.contains(lit("Erin is not red")));
}

TEST(MatchRule, SingleBinding) {
  KnowledgeBase kb;
  kb.insert(lit("Bob is blue"));
  const auto found = match_rule(parse_sentence("If something is blue then it is rough.", 8), kb);
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(found[0].rule_tag, 8);
  ASSERT_TRUE(found[0].binding);
  EXPECT_EQ(found[0].binding->name, "bob");
  EXPECT_EQ(found[0].conclusion, lit("Bob is rough"));
  EXPECT_EQ(found[0].matched, std::vector<Literal>{lit("Bob is blue")});
}

TEST(MatchRule, UnmetConditionYieldsNothing) {
  KnowledgeBase kb;
  kb.insert(lit("Erin is smart"));
  EXPECT_TRUE(match_rule(parse_sentence("If someone is smart and nice then they are round.", 12), kb).empty());
}

TEST(MatchRule, NegativeConditionsNeedExplicitNegatives) {
  const Rule r = parse_sentence("If something likes the cat and it does not visit the cat then it visits the lion.", 15);
  KnowledgeBase kb;
  kb.insert(lit("The mouse likes the cat"));
  EXPECT_TRUE(match_rule(r, kb).empty());
  kb.insert(lit("The mouse does not visit the cat"));
  ASSERT_EQ(match_rule(r, kb).size(), 1u);
}

TEST(MatchRule, GroundRuleHasEmptyBinding) {
  KnowledgeBase kb;
  kb.insert(lit("The cow likes the rabbit"));
  const auto found = match_rule(parse_sentence("If the cow likes the rabbit then the cow is cold.", 22), kb);
  ASSERT_EQ(found.size(), 1u);
  EXPECT_FALSE(found[0].binding);
  EXPECT_EQ(found[0].conclusion, lit("The cow is cold"));
}

TEST(MatchRule, OrderedByBindingConstant) {
  KnowledgeBase kb;
  kb.insert(lit("Gary is big"));
  kb.insert(lit("Anne is big"));
  kb.insert(lit("Dave is big"));
  const auto found = match_rule(parse_sentence("Big things are quiet.", 12), kb);
  ASSERT_EQ(found.size(), 3u);
  EXPECT_EQ(found[0].binding->name, "anne");
  EXPECT_EQ(found[1].binding->name, "dave");
  EXPECT_EQ(found[2].binding->name, "gary");
}

// Brute force: every (rule, constant) pair whose substituted conditions are
// all in the closure.
TEST(MatchRule, EqualsBruteForceOnClosedKb) {
  const Instance inst = fixtures::appendix_instance(0);
  const Closure c = forward_closure(inst);
  const auto constants = c.kb.constants();
  for (const auto& r : inst.rules) {
    if (r.is_fact()) continue;
    std::set<std::string> brute;
    if (!r.has_variable()) {
      bool ok = true;
      for (const auto& cond : r.conditions) ok = ok && c.kb.contains(cond);
      if (ok) brute.insert(r.conclusion.key());
    } else {
      for (const auto& k : constants) {
        bool ok = true;
        for (const auto& cond : r.conditions) ok = ok && c.kb.contains(substitute(cond, k));
        if (ok) brute.insert(substitute(r.conclusion, k).key());
      }
    }
    std::set<std::string> matched;
    for (const auto& i : match_rule(r, c.kb)) matched.insert(i.conclusion.key());
    EXPECT_EQ(matched, brute) << "Rule" << r.tag;
  }
}

TEST(ForwardClosure, AppendixRowOneDerivesQuiet) {
  const Closure c = forward_closure(fixtures::appendix_instance(0));
  const auto idx = c.kb.index_of(lit("Erin is quiet"));
  ASSERT_TRUE(idx);
  EXPECT_EQ(c.kb.origin(*idx).rule_tag, 12);
  EXPECT_TRUE(c.kb.contains(lit("Erin is big")));
  EXPECT_TRUE(c.kb.contains(lit("Erin is rough")));
  EXPECT_TRUE(c.contradictions.empty());
}

TEST(ForwardClosure, FactsOnly) {
  const Closure c = forward_closure(from_text("Anne is big. Bob is not red.", "Anne is big."));
  EXPECT_EQ(c.kb.size(), 2u);
}

TEST(ForwardClosure, OriginsCiteEarlierEntries) {
  const Closure c = forward_closure(fixtures::appendix_instance(2));
  for (std::size_t i = 0; i < c.kb.size(); ++i) {
    for (auto j : c.kb.origin(i).cited) EXPECT_LT(j, i);
  }
}

TEST(ForwardClosure, ContradictionsAreReported) {
  const Closure c = forward_closure(
      from_text("Erin is red. Erin is not big. If something is red then it is big.", "Erin is big."));
  ASSERT_EQ(c.contradictions.size(), 1u);
  EXPECT_THROW(answer_query(c.kb, lit("Erin is big")), AmbiguousAnswer);
  EXPECT_EQ(answer_query(c.kb, lit("Erin is red")), TruthValue::True);
}

TEST(ForwardClosure, OpaqueRulesAreUnsolvable) {
  const Instance inst = from_text("Erin is red. The purple elephant sings beautifully in the rain.", "Erin is red.");
  EXPECT_THROW(forward_closure(inst), OracleUnsolvable);
}

TEST(AnswerQuery, OpenWorld) {
  const Closure c = forward_closure(fixtures::appendix_instance(0));
  EXPECT_EQ(answer_query(c.kb, lit("Erin is not quiet")), TruthValue::False);
  EXPECT_EQ(answer_query(c.kb, lit("Erin is quiet")), TruthValue::True);
  EXPECT_EQ(answer_query(c.kb, lit("Harry is quiet")), TruthValue::Uncertain);
  const Closure row3 = forward_closure(fixtures::appendix_instance(2));
  EXPECT_EQ(answer_query(row3.kb, lit("The lion likes the mouse")), TruthValue::Uncertain);
}

TEST(SolveWithTrace, AppendixRowOneShape) {
  const Solution s = solve_with_trace(fixtures::appendix_instance(0));
  EXPECT_EQ(s.answer, TruthValue::False);
  const Trace& t = s.trace;
  ASSERT_TRUE(t.validate);
  EXPECT_EQ(t.validate->answer, TruthValue::False);
  EXPECT_EQ(t.validate->cited_premise, "Erin is quiet");
  EXPECT_TRUE(t.header_text.ends_with(": Erin, is not quiet"));
  EXPECT_EQ(t.steps.front(), TraceStep::snapshot({}));
  EXPECT_EQ(t.steps[1], TraceStep::fact_collect(3, "Erin is not furry"));
  EXPECT_EQ(t.steps[2], TraceStep::fact_collect(4, "Erin is red"));
  EXPECT_EQ(t.steps[4], TraceStep::infer(9, {"Erin is red"}, "Erin is rough"));
  // The last inference is Rule12 on `Erin is big`, as in the worked example.
  const TraceStep* last_infer = nullptr;
  for (const auto& step : t.steps) {
    if (step.kind == TraceStep::Kind::Infer) last_infer = &step;
  }
  ASSERT_NE(last_infer, nullptr);
  EXPECT_EQ(*last_infer, TraceStep::infer(12, {"Erin is big"}, "Erin is quiet"));
}

TEST(SolveWithTrace, AppendixLabels) {
  const TruthValue expected[] = {TruthValue::False, TruthValue::False, TruthValue::Uncertain, TruthValue::Uncertain};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(solve_with_trace(fixtures::appendix_instance(i)).answer, expected[i]);
  const Solution row2 = solve_with_trace(fixtures::appendix_instance(1));
  EXPECT_EQ(row2.trace.validate->cited_premise, "The squirrel visits the mouse");
}

TEST(SolveWithTrace, StatedFactIsDepthZero) {
  const Solution s = solve_with_trace(from_text("Erin is red. Bob is big. If something is big then it is red.", "Erin is red."));
  EXPECT_EQ(s.answer, TruthValue::True);
  ASSERT_EQ(s.trace.reasoning_steps(), 1u);
  EXPECT_EQ(s.trace.steps[1], TraceStep::fact_collect(1, "Erin is red"));
  EXPECT_EQ(s.trace.validate->answer, TruthValue::True);
}

TEST(SolveWithTrace, AlreadyInKbMarkedOnce) {
  const Solution s = solve_with_trace(fixtures::appendix_instance(0));
  std::size_t marked = 0;
  for (const auto& step : s.trace.steps) marked += step.already_in_kb ? 1 : 0;
  EXPECT_EQ(marked, 1u);
}

TEST(SolveWithTrace, RejectsMultipleChoice) {
  Instance inst = make_instance("ld", Dataset::LogicalDeduction, "The owl is left of the robin.",
                                "Which is leftmost?", {"The owl.", "The robin."}, Answer::option('A'));
  EXPECT_THROW(solve_with_trace(inst), OracleUnsolvable);
}

TEST(SolveWithTrace, Deterministic) {
  const Instance inst = fixtures::appendix_instance(2);
  EXPECT_EQ(render_trace(solve_with_trace(inst).trace), render_trace(solve_with_trace(inst).trace));
}

TEST(SolveWithTrace, RandomAgreementAndInvariants) {
  for (const auto& inst : generate_instances(500, 21)) {
    const Solution s = solve_with_trace(inst);
    const Closure c = forward_closure(inst);
    ASSERT_EQ(s.answer, answer_query(c.kb, *inst.question.literal)) << inst.id;
    ASSERT_TRUE(s.trace.halted()) << inst.id;

    for (const auto& step : s.trace.steps) {
      if (step.kind != TraceStep::Kind::KBSnapshot) continue;
      std::set<std::string> seen;
      for (const auto& p : step.kb_contents) ASSERT_TRUE(seen.insert(normalize_premise(p)).second) << inst.id;
    }

    // Halting bound over FactCollect + Infer + Validate.
    // Constants are everything the instance mentions, not just what the KB holds.
    std::set<std::string> predicates;
    std::set<std::string> constants;
    std::size_t facts = 0;
    auto note = [&](const Literal& l) {
      predicates.insert(l.predicate.name + "/" + (l.predicate.object ? l.predicate.object->name : ""));
      if (!l.subject.is_variable()) constants.insert(l.subject.name);
      if (l.predicate.object && !l.predicate.object->is_variable()) constants.insert(l.predicate.object->name);
    };
    note(*inst.question.literal);
    for (const auto& r : inst.rules) {
      facts += r.is_fact() ? 1 : 0;
      note(r.conclusion);
      for (const auto& cond : r.conditions) note(cond);
    }
    const std::size_t bound = constants.size() * predicates.size() * 2 + facts + 1;
    ASSERT_LE(s.trace.reasoning_steps() + 1, bound) << inst.id;
  }
}

TEST(ForwardClosure, MatchesNaiveFixpoint) {
  for (const auto& inst : generate_instances(300, 31)) {
    const Closure c = forward_closure(inst);
    const auto naive = fixtures::naive_closure(inst.rules);
    std::set<std::string> ours;
    for (const auto& l : c.kb.entries()) {
      fixtures::NaiveAtom a = fixtures::naive_atom(l);
      ours.insert(a.ground_key(""));
    }
    ASSERT_EQ(ours, naive.facts) << inst.id;
  }
}
