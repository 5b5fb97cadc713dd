#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

#include "appendix_corpus.hpp"
#include "sacot/error.hpp"
#include "sacot/prompt_builder.hpp"
#include "sacot/trace.hpp"
#include "sacot/verifier.hpp"

using namespace sacot;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::size_t occurrences(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

const Instance& erin() {
  static const Instance inst = fixtures::appendix_instance(0);
  return inst;
}

}  // namespace

TEST(BuildPrompt, SymbolicLayout) {
  const auto demos = default_demonstrations(Dataset::ProofWriter, PromptVariant::SymbolicAided, 2);
  const PromptText p = build_prompt(PromptVariant::SymbolicAided, demos, erin());
  EXPECT_EQ(p.instance_id, erin().id);
  EXPECT_EQ(p.text.rfind(kSymbolicInstruction, 0), 0u);
  EXPECT_NE(p.text.find("# (Rule4): Erin is red."), std::string::npos);
  EXPECT_NE(p.text.find("### Example1: Given list of facts and rules:"), std::string::npos);
  EXPECT_NE(p.text.find("### Example2: Given list of facts and rules:"), std::string::npos);
  EXPECT_EQ(p.text.substr(p.text.size() - 11), "# (Answer):");

  const auto target = p.text.substr(p.text.rfind("### Given list of facts and rules:"));
  EXPECT_EQ(occurrences(target, "# (Rule"), erin().rules.size());
  for (const auto& r : erin().rules) EXPECT_EQ(occurrences(target, "# (Rule" + std::to_string(r.tag) + "): "), 1u);
}

TEST(BuildPrompt, StandardHasJsonAnswers) {
  const auto demos = default_demonstrations(Dataset::ProofWriter, PromptVariant::Standard, 1);
  const PromptText p = build_prompt(PromptVariant::Standard, demos, erin());
  EXPECT_NE(p.text.find("{\"answer\":"), std::string::npos);
  EXPECT_NE(p.text.find("Options: A) True B) False C) Uncertain"), std::string::npos);
  EXPECT_NE(p.text.find("Context: "), std::string::npos);
  EXPECT_EQ(p.text.find(kSymbolicInstruction), std::string::npos);
}

TEST(BuildPrompt, CoTHasReasoningField) {
  const auto demos = default_demonstrations(Dataset::ProofWriter, PromptVariant::CoT, 2);
  const PromptText p = build_prompt(PromptVariant::CoT, demos, erin());
  EXPECT_NE(p.text.find("{\"reasoning\":"), std::string::npos);
}

TEST(BuildPrompt, Errors) {
  EXPECT_THROW(build_prompt(PromptVariant::SymbolicAided, {}, erin()), MissingDemonstrations);
  const auto demos = default_demonstrations(Dataset::ProofWriter, PromptVariant::SymbolicAided, 1);
  Instance untagged = erin();
  untagged.rules.clear();
  EXPECT_THROW(build_prompt(PromptVariant::SymbolicAided, demos, untagged), UntaggedRules);
}

TEST(BuildPrompt, Deterministic) {
  const auto demos = default_demonstrations(Dataset::ProofWriter, PromptVariant::SymbolicAided, 2);
  EXPECT_EQ(build_prompt(PromptVariant::SymbolicAided, demos, erin()).text,
            build_prompt(PromptVariant::SymbolicAided, demos, erin()).text);
}

TEST(Ablation, NoKbIsALineFilter) {
  for (Dataset d : {Dataset::ProofWriter, Dataset::ProntoQA}) {
    const auto full_demos = default_demonstrations(d, PromptVariant::SymbolicAided, 3);
    const auto nokb_demos = default_demonstrations(d, PromptVariant::SymbolicAidedNoKB, 3);
    for (const auto& target : default_demo_instances(d)) {
      const auto full = lines_of(build_prompt(PromptVariant::SymbolicAided, full_demos, target).text);
      const auto nokb = lines_of(build_prompt(PromptVariant::SymbolicAidedNoKB, nokb_demos, target).text);
      std::vector<std::string> filtered;
      std::copy_if(full.begin(), full.end(), std::back_inserter(filtered),
                   [](const std::string& l) { return l.rfind("# KB =", 0) != 0; });
      EXPECT_EQ(filtered, nokb) << target.id;
      EXPECT_GT(full.size(), nokb.size());
    }
  }
}

TEST(Ablation, NoValidateReplacesOnlyTheValidateLine) {
  const Demonstration full = make_demonstration(erin(), PromptVariant::SymbolicAided);
  const Demonstration bare = make_demonstration(erin(), PromptVariant::SymbolicAidedNoValidate);
  const auto a = lines_of(full.solution_text);
  const auto b = lines_of(bare.solution_text);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i + 1 < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
  EXPECT_EQ(b.back(), "=> Answer = False.");
  EXPECT_NE(a.back().find("= False."), std::string::npos);
  EXPECT_EQ(bare.answer, erin().gold);
}

TEST(MakeDemonstration, VariantShapes) {
  EXPECT_EQ(make_demonstration(erin(), PromptVariant::Standard).solution_text, "{\"answer\": \"B\"}");
  const Demonstration sym = make_demonstration(erin(), PromptVariant::SymbolicAided);
  EXPECT_NE(sym.solution_text.find("KB('Erin is quiet')) = False."), std::string::npos);
}

TEST(MakeDemonstration, RejectsUnsolvableAndWrongGold) {
  Instance wrong = erin();
  wrong.gold = Answer::truth(TruthValue::True);
  EXPECT_THROW(make_demonstration(wrong, PromptVariant::SymbolicAided), OracleUnsolvable);
  Instance opaque = make_instance("o", Dataset::ProofWriter, "The purple elephant sings beautifully in the rain.",
                                  "Erin is red.", {}, Answer::truth(TruthValue::True));
  EXPECT_THROW(make_demonstration(opaque, PromptVariant::SymbolicAided), OracleUnsolvable);
}

TEST(Demonstrations, BundledSetsReparseAndVerifyClean) {
  for (Dataset d : {Dataset::ProofWriter, Dataset::ProntoQA}) {
    for (const auto& demo : default_demonstrations(d, PromptVariant::SymbolicAided, 10)) {
      const Trace t = parse_trace(demo.solution_text);
      EXPECT_TRUE(t.diagnostics.empty()) << demo.instance.id;
      EXPECT_TRUE(verify_trace(demo.instance, t).clean()) << demo.instance.id;
      EXPECT_EQ(demo.answer, demo.instance.gold);
    }
  }
  EXPECT_THROW(default_demonstrations(Dataset::FOLIO, PromptVariant::SymbolicAided), MissingDemonstrations);
}

TEST(Demonstrations, BundledSetsCoverEveryLabel) {
  std::set<std::string> answers;
  for (const auto& inst : default_demo_instances(Dataset::ProofWriter)) answers.insert(inst.gold.str());
  EXPECT_EQ(answers, (std::set<std::string>{"True", "False", "Uncertain"}));
  for (const auto& inst : default_demo_instances(Dataset::ProntoQA)) {
    EXPECT_EQ(inst.question.options, (std::vector<std::string>{"True", "False"}));
  }
}

TEST(Demonstrations, JsonRoundTrip) {
  DemoSet set;
  set.dataset = Dataset::ProofWriter;
  set.variant = PromptVariant::SymbolicAided;
  set.demos = default_demonstrations(Dataset::ProofWriter, PromptVariant::SymbolicAided, 2);
  const DemoSet back = demonstrations_from_json(demonstrations_to_json(set));
  ASSERT_EQ(back.demos.size(), 2u);
  EXPECT_EQ(back.dataset, set.dataset);
  EXPECT_EQ(back.variant, set.variant);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back.demos[i].solution_text, set.demos[i].solution_text);
    EXPECT_EQ(back.demos[i].answer, set.demos[i].answer);
    EXPECT_EQ(back.demos[i].instance.rules, set.demos[i].instance.rules);
  }
  const auto path = std::filesystem::temp_directory_path() / "sacot_demos_test.json";
  save_demonstrations(set, path.string());
  EXPECT_EQ(load_demonstrations(path.string()).demos.size(), 2u);
  std::filesystem::remove(path);
}

TEST(Demonstrations, AdaptRegeneratesForOtherVariants) {
  DemoSet set;
  set.variant = PromptVariant::SymbolicAided;
  set.demos = default_demonstrations(Dataset::ProofWriter, PromptVariant::SymbolicAided, 2);
  const auto adapted = adapt_demonstrations(set, PromptVariant::SymbolicAidedNoKB);
  ASSERT_EQ(adapted.size(), 2u);
  EXPECT_EQ(adapted[0].solution_text.find("# KB ="), std::string::npos);
  EXPECT_EQ(adapt_demonstrations(set, PromptVariant::SymbolicAided)[0].solution_text, set.demos[0].solution_text);
}

TEST(Demonstrations, SelectPrefersDistinctAnswers) {
  std::vector<Instance> pool;
  for (std::size_t i = 0; i < 4; ++i) pool.push_back(fixtures::appendix_instance(i));
  const auto chosen = select_demonstrations(pool, PromptVariant::SymbolicAided, 2);
  ASSERT_EQ(chosen.size(), 2u);
  EXPECT_NE(chosen[0].answer, chosen[1].answer);
}
