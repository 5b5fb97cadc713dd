#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "appendix_corpus.hpp"
#include "sacot/reasoner.hpp"
#include "sacot/synth.hpp"
#include "sacot/verifier.hpp"

using namespace sacot;

namespace {

std::set<ErrorClass> classes(const VerificationReport& r) { return {r.error_classes.begin(), r.error_classes.end()}; }

VerificationReport verify_text(std::size_t row, const char* text) {
  return verify_trace(fixtures::appendix_instance(row), parse_trace(text));
}

Literal lit(const char* text) { return *parse_premise(text); }

}  // namespace

TEST(VerifyTrace, OracleTracesAreClean) {
  for (std::size_t row = 0; row < 4; ++row) {
    const Instance inst = fixtures::appendix_instance(row);
    const VerificationReport r = verify_trace(inst, solve_with_trace(inst).trace);
    EXPECT_TRUE(r.clean()) << inst.id;
    EXPECT_TRUE(r.halted);
    EXPECT_FALSE(r.cyclic);
    EXPECT_TRUE(r.validate_consistent);
    EXPECT_TRUE(r.final_answer_correct);
    EXPECT_TRUE(std::all_of(r.step_verdicts.begin(), r.step_verdicts.end(),
                            [](const StepVerdict& v) { return v.status == StepVerdict::Status::Valid; }));
  }
}

TEST(VerifyTrace, HallucinatedRule) {
  const VerificationReport r = verify_text(0, fixtures::kHallucinatedRuleTrace);
  EXPECT_EQ(classes(r), std::set<ErrorClass>{ErrorClass::HallucinatedRule});
  EXPECT_FALSE(r.final_answer_correct);
  for (const auto& v : r.step_verdicts) {
    if (v.status != StepVerdict::Status::Valid) EXPECT_FALSE(v.detail.empty());
  }
}

TEST(VerifyTrace, CyclicAndRuleMatch) {
  const VerificationReport r = verify_text(1, fixtures::kCyclicMatchTrace);
  const auto c = classes(r);
  EXPECT_FALSE(c.empty());
  for (auto e : c) EXPECT_TRUE(e == ErrorClass::CyclicInference || e == ErrorClass::RuleMatchError);
  EXPECT_TRUE(r.cyclic);
}

TEST(VerifyTrace, UnstoppableLoop) {
  const VerificationReport r = verify_text(2, fixtures::kUnstoppableTrace);
  EXPECT_EQ(classes(r), (std::set<ErrorClass>{ErrorClass::UnstoppableFlow, ErrorClass::CyclicInference}));
  EXPECT_FALSE(r.halted);
  EXPECT_TRUE(r.cyclic);
}

TEST(VerifyTrace, BackwardsRuleIsRuleMatchError) {
  const VerificationReport r = verify_text(3, fixtures::kRow4SymbolicOutput);
  EXPECT_EQ(classes(r), std::set<ErrorClass>{ErrorClass::RuleMatchError});
  EXPECT_TRUE(r.validate_consistent);
  EXPECT_FALSE(r.final_answer_correct);
}

TEST(VerifyTrace, CitingWrongPremiseIsRuleMatchError) {
  // The printed first example cites `Erin is red` for Rule11, whose condition is `rough`.
  const VerificationReport r = verify_text(0, fixtures::kRow1SymbolicOutput);
  EXPECT_EQ(classes(r), std::set<ErrorClass>{ErrorClass::RuleMatchError});
  EXPECT_TRUE(r.final_answer_correct);
  EXPECT_TRUE(r.validate_consistent);
}

TEST(VerifyTrace, FactCollectMismatch) {
  const VerificationReport r = verify_text(0,
                                           "=> Rule4 = `Erin is blue`\n"
                                           "=> Validate(Question=`Erin is not quiet`, KB('Erin is blue')) = Uncertain.");
  EXPECT_EQ(classes(r), std::set<ErrorClass>{ErrorClass::HallucinatedRule});
}

TEST(VerifyTrace, FalseAlreadyMarkerIsKbUpdateError) {
  const VerificationReport r = verify_text(0,
                                           "=> Rule4 = `Erin is red`\n"
                                           "=> F(KB('Erin is red'), Rule9) => `Erin is rough` (already in KB)\n"
                                           "=> Validate(Question=`Erin is not quiet`, KB('Erin is rough')) = Uncertain.");
  ASSERT_TRUE(std::any_of(r.step_verdicts.begin(), r.step_verdicts.end(),
                          [](const StepVerdict& v) { return v.status == StepVerdict::Status::KBUpdateError; }));
  EXPECT_EQ(classes(r), std::set<ErrorClass>{ErrorClass::RuleMatchError});
}

TEST(VerifyTrace, WrongSnapshotIsKbUpdateError) {
  const VerificationReport r = verify_text(0,
                                           "=> Rule4 = `Erin is red`\n"
                                           "# KB = {Erin is red, Erin is big}\n"
                                           "=> Validate(Question=`Erin is not quiet`, KB('Erin is red')) = Uncertain.");
  ASSERT_TRUE(std::any_of(r.step_verdicts.begin(), r.step_verdicts.end(),
                          [](const StepVerdict& v) { return v.status == StepVerdict::Status::KBUpdateError; }));
  EXPECT_EQ(classify_errors(r)[ErrorClass::RuleMatchError], 1u);
}

TEST(VerifyTrace, SnapshotsCompareAsSets) {
  const VerificationReport r = verify_text(0,
                                           "=> Rule3 = `Erin is not furry`\n"
                                           "=> Rule4 = `Erin is red`\n"
                                           "# KB = {erin is red, Erin is not furry}\n"
                                           "=> Validate(Question=`Erin is not quiet`, KB('Erin is red')) = Uncertain.");
  EXPECT_TRUE(r.clean());
}

TEST(VerifyTrace, InconsistentValidate) {
  const VerificationReport r = verify_text(0,
                                           "=> Rule4 = `Erin is red`\n"
                                           "=> Validate(Question=`Erin is not quiet`, KB('Erin is red')) = True.");
  EXPECT_FALSE(r.validate_consistent);
  EXPECT_EQ(classes(r), std::set<ErrorClass>{ErrorClass::RuleMatchError});
}

TEST(VerifyTrace, EmptyTraceIsUnstoppable) {
  const VerificationReport r = verify_text(0, "");
  EXPECT_FALSE(r.halted);
  EXPECT_EQ(classes(r), std::set<ErrorClass>{ErrorClass::UnstoppableFlow});
}

TEST(VerifyTrace, SkipsSemanticsForFolio) {
  Instance inst = make_instance("f1", Dataset::FOLIO, "All people who regularly drink coffee are dependent on caffeine.",
                                "Rina is dependent on caffeine.", {}, Answer::truth(TruthValue::True));
  const VerificationReport r = verify_trace(
      inst, parse_trace("=> Rule1 = `Rina drinks coffee`\n=> Validate(Question=`Rina is dependent on caffeine`, "
                        "KB('Rina drinks coffee')) = True."));
  EXPECT_FALSE(r.semantic_checked);
  EXPECT_TRUE(r.clean());
  EXPECT_TRUE(r.final_answer_correct);
}

TEST(VerifyTrace, InvariantsOnRandomOracleTraces) {
  for (const auto& inst : generate_instances(200, 41)) {
    const VerificationReport r = verify_trace(inst, solve_with_trace(inst).trace);
    ASSERT_TRUE(r.clean()) << inst.id;
    ASSERT_TRUE(r.final_answer_correct) << inst.id;
  }
}

TEST(CheckValidateStep, Semantics) {
  KnowledgeBase kb;
  kb.insert(lit("Erin is quiet"));
  EXPECT_TRUE(check_validate_step(kb, lit("Erin is not quiet"), TruthValue::False));
  EXPECT_FALSE(check_validate_step(kb, lit("Erin is not quiet"), TruthValue::Uncertain));
  EXPECT_TRUE(check_validate_step(KnowledgeBase{}, lit("Bob is big"), TruthValue::Uncertain));
}

TEST(ClassifyErrors, Projection) {
  EXPECT_EQ(classify_errors(VerificationReport{}).total(), 0u);
  VerificationReport r;
  r.error_classes = {ErrorClass::HallucinatedRule, ErrorClass::UnstoppableFlow};
  const ErrorHistogram h = classify_errors(r);
  EXPECT_EQ(h[ErrorClass::HallucinatedRule], 1u);
  EXPECT_EQ(h[ErrorClass::UnstoppableFlow], 1u);
  EXPECT_EQ(h.total(), 2u);
  EXPECT_EQ(label(ErrorClass::CyclicInference), "Failure on Cyclic Inference Graphs");
}

TEST(ClassifyErrors, HallucinationWithoutValidate) {
  const VerificationReport r = verify_text(0, "=> Rule4 = `Erin is red`\n=> F(KB('Erin is red'), Rule30) => `Erin is big`");
  const ErrorHistogram h = classify_errors(r);
  EXPECT_EQ(h[ErrorClass::HallucinatedRule], 1u);
  EXPECT_EQ(h[ErrorClass::UnstoppableFlow], 1u);
}
