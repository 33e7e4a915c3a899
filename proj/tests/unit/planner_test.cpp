#include <gtest/gtest.h>

#include "adapt/errors.hpp"
#include "adapt/planner.hpp"
#include "test_support.hpp"

namespace adapt {
namespace {

using testing::minibook;
using testing::ReplayBackend;

TEST(ParsePlan, Basic) {
  Plan p = parse_plan("Step 1: A\nStep 2: B\nExecution Order: Step 1 AND Step 2");
  ASSERT_EQ(p.steps.size(), 2u);
  EXPECT_EQ(p.steps[0].description, "A");
  EXPECT_EQ(p.steps[1].description, "B");
  EXPECT_EQ(p.order, LogicExpr::all_of({LogicExpr::leaf(1), LogicExpr::leaf(2)}));
  EXPECT_TRUE(p.warnings.empty());
}

TEST(ParsePlan, MissingOrderDefaultsToAnd) {
  Plan p = parse_plan("Step 1: a\nStep 2: b\nStep 3: c\n");
  EXPECT_EQ(format_logic(p.order), "Step 1 AND Step 2 AND Step 3");
  ASSERT_EQ(p.warnings.size(), 1u);
}

TEST(ParsePlan, DanglingReference) {
  EXPECT_THROW(parse_plan("Step 1: a\nStep 2: b\nExecution Order: Step 1 AND Step 9"),
               PlanParseFailure);
}

TEST(ParsePlan, Rejections) {
  EXPECT_THROW(parse_plan("nothing useful"), PlanParseFailure);
  EXPECT_THROW(parse_plan("Step 1: a\nStep 3: b"), PlanParseFailure);
  EXPECT_THROW(parse_plan("Step 2: a"), PlanParseFailure);
  EXPECT_THROW(parse_plan("Step 1: a\nExecution Order: Step 1 AND"), PlanParseFailure);
  EXPECT_THROW(parse_plan("Step 1:   \nExecution Order: Step 1"), PlanParseFailure);
}

TEST(ParsePlan, ToleratesSurroundingProse) {
  Plan p = parse_plan(
      "Here is my plan.\n- Step 1: find a mug\n  Step 2: clean the mug\n"
      "Step 3: put mug on desk\nexecution order: Step 1 AND Step 2 AND Step 3\nDone.");
  EXPECT_EQ(p.steps.size(), 3u);
  EXPECT_EQ(p.steps[2].description, "put mug on desk");
}

TEST(ParsePlan, LongDescriptionsTruncated) {
  Plan p = parse_plan("Step 1: " + std::string(800, 'x'));
  EXPECT_EQ(p.steps[0].description.size(), kMaxStepChars + 3);
  EXPECT_EQ(p.steps[0].description.substr(kMaxStepChars), "...");
}

TEST(ParsePlan, OrOverLocations) {
  Plan p = parse_plan(
      "Step 1: find a mug on the countertop\nStep 2: find a mug in the cabinet\n"
      "Execution Order: Step 1 OR Step 2");
  EXPECT_EQ(p.order.kind(), LogicExpr::Kind::kOr);
}

TEST(MakePlan, RetriesCountedCalls) {
  ReplayBackend backend({"garbage", "Step 1: a\nStep 2: b\nExecution Order: Step 1 OR Step 2"});
  CallLedger ledger;
  PlannerConfig cfg;
  cfg.max_parse_retries = 2;
  Plan p = make_plan("t", {}, cfg, backend, ledger);
  EXPECT_EQ(p.steps.size(), 2u);
  EXPECT_EQ(ledger.planner_calls(), 2);
  EXPECT_FALSE(p.warnings.empty());  // 2 steps is below the usual range
}

TEST(MakePlan, GivesUpAfterRetries) {
  ReplayBackend backend({"garbage"});
  CallLedger ledger;
  PlannerConfig cfg;
  cfg.max_parse_retries = 1;
  EXPECT_THROW(make_plan("t", {}, cfg, backend, ledger), PlanParseFailure);
  EXPECT_EQ(ledger.planner_calls(), 2);
}

TEST(MakePlan, DegenerateSelfPlanNotRetried) {
  ReplayBackend backend({"Step 1: Fetch 2 stick directly.\nExecution Order: Step 1"});
  CallLedger ledger;
  EXPECT_THROW(make_plan("fetch 2 stick directly", {}, {}, backend, ledger), DegeneratePlan);
  EXPECT_EQ(ledger.planner_calls(), 1);
}

TEST(MakePlan, ScriptedBeehive) {
  auto backend = make_backend({}, minibook());
  CallLedger ledger;
  Plan p = make_plan("craft beehive", {}, {}, *backend, ledger);
  EXPECT_EQ(p.steps.size(), 3u);
  EXPECT_EQ(format_logic(p.order), "Step 1 AND Step 2 AND Step 3");
  EXPECT_EQ(ledger.planner_calls(), 1);
  Plan again = make_plan("craft beehive", {}, {}, *backend, ledger);
  EXPECT_EQ(again.raw_text, p.raw_text);
}

TEST(MakePlan, PromptCarriesTaskAndContext) {
  ReplayBackend backend({"Step 1: a\nStep 2: b\nStep 3: c"});
  CallLedger ledger;
  make_plan("craft beehive", {{"inventory", "[honeycomb] (3)"}}, {}, backend, ledger);
  const std::string& prompt = backend.requests[0].messages[0].text;
  EXPECT_NE(prompt.find("Task: craft beehive"), std::string::npos);
  EXPECT_NE(prompt.find("inventory: [honeycomb] (3)"), std::string::npos);
  EXPECT_NE(prompt.find("Execution Order"), std::string::npos);
}

}  // namespace
}  // namespace adapt
