#include <gtest/gtest.h>

#include <algorithm>

#include "appendix_corpus.hpp"
#include "sacot/error.hpp"
#include "sacot/reasoner.hpp"
#include "sacot/synth.hpp"
#include "sacot/trace.hpp"

using namespace sacot;

namespace {

std::size_t count_kind(const Trace& t, TraceStep::Kind kind) {
  return static_cast<std::size_t>(
      std::count_if(t.steps.begin(), t.steps.end(), [&](const TraceStep& s) { return s.kind == kind; }));
}

}  // namespace

TEST(ParseTrace, AppendixRowOne) {
  const Trace t = parse_trace(fixtures::kRow1SymbolicOutput);
  EXPECT_TRUE(t.diagnostics.empty());
  EXPECT_EQ(count_kind(t, TraceStep::Kind::FactCollect), 2u);
  EXPECT_EQ(count_kind(t, TraceStep::Kind::Infer), 4u);
  EXPECT_EQ(count_kind(t, TraceStep::Kind::KBSnapshot), 6u);
  ASSERT_TRUE(t.validate);
  EXPECT_EQ(t.validate->answer, TruthValue::False);
  EXPECT_EQ(t.validate->question_text, "Erin is not quiet");
  EXPECT_EQ(t.validate->cited_premise, "Erin is quiet");
  EXPECT_TRUE(t.header_text.ends_with(": Erin, is not quiet"));

  EXPECT_EQ(t.steps[1], TraceStep::fact_collect(3, "Erin is not furry"));
  EXPECT_EQ(t.steps[2], TraceStep::fact_collect(4, "Erin is red"));
  const auto& already = t.steps[6];
  EXPECT_EQ(already.kind, TraceStep::Kind::Infer);
  EXPECT_EQ(already.rule_tag, 11);
  EXPECT_TRUE(already.already_in_kb);
}

TEST(ParseTrace, EmptyInputIsNonHalting) {
  const Trace t = parse_trace("");
  EXPECT_TRUE(t.steps.empty());
  EXPECT_FALSE(t.halted());
}

TEST(ParseTrace, TolerantQuotes) {
  const Trace t = parse_trace(
      "=> Rule4 = 'Erin is red'\n"
      "=> F(KB(\"Erin is red\"), Rule9) => \"Erin is rough\"\n"
      "=> Validate(Question='Erin is rough', KB(`Erin is rough`)) = True.");
  ASSERT_EQ(t.steps.size(), 2u);
  EXPECT_EQ(t.steps[0].produced.front(), "Erin is red");
  EXPECT_EQ(t.steps[1].cited_premises.front(), "Erin is red");
  EXPECT_EQ(t.steps[1].produced.front(), "Erin is rough");
  ASSERT_TRUE(t.validate);
  EXPECT_EQ(t.validate->answer, TruthValue::True);
}

TEST(ParseTrace, MultipleCitedAndProduced) {
  const Trace t = parse_trace("=> F(KB('Erin is red', 'Erin is big'), Rule12) => `Erin is quiet`, `Erin is nice`");
  ASSERT_EQ(t.steps.size(), 1u);
  EXPECT_EQ(t.steps[0].cited_premises.size(), 2u);
  EXPECT_EQ(t.steps[0].produced.size(), 2u);
}

TEST(ParseTrace, MalformedLinesAreDiagnosticsOnly) {
  const Trace t = parse_trace(
      "=> Rule4 = `Erin is red`\n"
      "Hmm, let me think about this.\n"
      "# just a note\n"
      "=> Validate(Question=`Erin is red`, KB('Erin is red')) = True.\n"
      "So the answer is True.");
  EXPECT_EQ(t.diagnostics.size(), 2u);
  EXPECT_TRUE(t.halted());
  EXPECT_EQ(count_kind(t, TraceStep::Kind::Comment), 1u);
}

TEST(ParseTrace, StepBudgetTruncates) {
  std::string text;
  for (std::size_t i = 0; i < kStepBudget + 25; ++i) text += "=> F(KB('Erin is red'), Rule9) => `Erin is rough`\n";
  const Trace t = parse_trace(text);
  EXPECT_TRUE(t.truncated);
  EXPECT_EQ(t.reasoning_steps(), kStepBudget);
  EXPECT_TRUE(std::any_of(t.diagnostics.begin(), t.diagnostics.end(),
                          [](const TraceDiagnostic& d) { return d.kind == TraceDiagnostic::Kind::UnstoppableFlow; }));
}

TEST(ParseTrace, AnswerPrefixAndBareAnswer) {
  const Trace t = parse_trace("# (Answer): => Rule4 = `Erin is red`\n=> Answer = True.");
  ASSERT_EQ(t.steps.size(), 1u);
  ASSERT_TRUE(t.validate);
  EXPECT_TRUE(t.validate->bare);
  EXPECT_EQ(t.validate->answer, TruthValue::True);
}

TEST(RenderTrace, MinimalTraceHasFiveLines) {
  Trace t;
  t.header_text = "Erin, is red";
  t.steps = {TraceStep::fact_collect(4, "Erin is red"), TraceStep::snapshot({"Erin is red"})};
  t.validate = ValidateStep{"Erin is red", "Erin is red", TruthValue::True, false};
  const std::string text = render_trace(t);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
  EXPECT_NE(text.find(kValidateComment), std::string::npos);
  EXPECT_NE(text.find("=> Rule4 = `Erin is red`"), std::string::npos);
  EXPECT_EQ(text.substr(text.size() - 8), "= True.\n");
}

TEST(RenderTrace, NonHaltingThrows) {
  Trace t;
  t.steps = {TraceStep::fact_collect(4, "Erin is red")};
  EXPECT_THROW(render_trace(t), NonHaltingTrace);
}

TEST(RenderTrace, RowTwoOracleTraceRoundTrips) {
  const Solution s = solve_with_trace(fixtures::appendix_instance(1));
  const std::string once = render_trace(s.trace);
  const Trace parsed = parse_trace(once);
  EXPECT_TRUE(parsed.diagnostics.empty());
  EXPECT_EQ(parsed, s.trace);
  EXPECT_EQ(render_trace(parsed), once);
  EXPECT_NE(once.find("`The squirrel visits the mouse`"), std::string::npos);
}

TEST(RenderTrace, RowOneVerbatimRendersToFixedPoint) {
  const std::string once = render_trace(parse_trace(fixtures::kRow1SymbolicOutput));
  EXPECT_EQ(render_trace(parse_trace(once)), once);
}

TEST(RenderTrace, RandomOracleTracesAreFixedPoints) {
  for (const auto& inst : generate_instances(200, 11)) {
    const std::string once = render_trace(solve_with_trace(inst).trace);
    const Trace parsed = parse_trace(once);
    ASSERT_TRUE(parsed.diagnostics.empty()) << inst.id;
    ASSERT_EQ(render_trace(parsed), once) << inst.id;
  }
}

TEST(NormalizePremise, AbbreviationsMatch) {
  EXPECT_EQ(normalize_premise("cow eats mouse"), normalize_premise("The cow eats the mouse"));
  EXPECT_EQ(normalize_premise("Erin is quiet."), normalize_premise("erin is quiet"));
  EXPECT_EQ(normalize_premise("some free text"), "some free text");
}

TEST(SnapshotDelta, ExposesAddedEntries) {
  const auto d = snapshot_delta(TraceStep::snapshot({"Erin is red"}), TraceStep::snapshot({"Erin is red", "Erin is big"}));
  ASSERT_EQ(d.added.size(), 1u);
  EXPECT_EQ(d.added[0], "Erin is big");
  EXPECT_TRUE(d.removed.empty());
}

TEST(ExtractAnswer, JsonAnswers) {
  EXPECT_EQ(extract_answer(R"({"reasoning": "...", "answer": "B"})", PromptVariant::CoT), Answer::truth(TruthValue::False));
  EXPECT_EQ(extract_answer(R"(blah {"answer": "A"} then {"answer": "C"})", PromptVariant::Standard),
            Answer::truth(TruthValue::Uncertain));
  EXPECT_EQ(extract_answer(R"({"answer": "True"})", PromptVariant::Standard), Answer::truth(TruthValue::True));
  EXPECT_EQ(extract_answer(R"({"answer": "D"})", PromptVariant::Standard, false), Answer::option('D'));
}

TEST(ExtractAnswer, SymbolicValidateFirst) {
  const std::string row3 =
      "=> F(KB('The mouse visits the squirrel'), Rule22) => `The mouse does not visit the lion`\n"
      "# valid the question with current inferred premies\n"
      "=> Validate(Question=`The lion likes the mouse`, KB('The mouse likes the lion')) =Uncertain.";
  EXPECT_EQ(extract_answer(row3, PromptVariant::SymbolicAided), Answer::truth(TruthValue::Uncertain));
  EXPECT_EQ(extract_answer(row3 + "\nTherefore the answer is True.", PromptVariant::SymbolicAided),
            Answer::truth(TruthValue::Uncertain));
  EXPECT_EQ(extract_answer("=> Rule1 = `Erin is red`\nThe answer is False.", PromptVariant::SymbolicAided),
            Answer::truth(TruthValue::False));
  EXPECT_EQ(extract_answer("=> Answer = True.", PromptVariant::SymbolicAidedNoValidate), Answer::truth(TruthValue::True));
}

TEST(ExtractAnswer, UnmatchedIsUnknown) {
  EXPECT_TRUE(extract_answer("the answer is maybe", PromptVariant::SymbolicAided).is_unknown());
  EXPECT_TRUE(extract_answer("the answer is maybe", PromptVariant::CoT).is_unknown());
  EXPECT_TRUE(extract_answer("", PromptVariant::Standard).is_unknown());
}

TEST(ExtractAnswer, AgreesWithOracleOnGeneratedTraces) {
  for (const auto& inst : generate_instances(100, 12)) {
    const Solution s = solve_with_trace(inst);
    EXPECT_EQ(extract_answer(render_trace(s.trace), PromptVariant::SymbolicAided), Answer::truth(s.answer)) << inst.id;
  }
}
