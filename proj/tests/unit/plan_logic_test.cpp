#include <gtest/gtest.h>

#include "adapt/errors.hpp"
#include "adapt/plan_logic.hpp"
#include "test_support.hpp"

namespace adapt {
namespace {

using testing::brute_force;
using testing::random_expr;

LogicExpr L(int i) { return LogicExpr::leaf(i); }
LogicExpr And(std::vector<LogicExpr> c) { return LogicExpr::all_of(std::move(c)); }
LogicExpr Or(std::vector<LogicExpr> c) { return LogicExpr::any_of(std::move(c)); }

TEST(ParseLogic, SingleStepIsLeaf) { EXPECT_EQ(parse_logic("Step 1"), L(1)); }

TEST(ParseLogic, OrBindsTighterThanAnd) {
  EXPECT_EQ(parse_logic("Step 1 OR Step 2 OR Step 3 AND Step 4 AND Step 5"),
            And({Or({L(1), L(2), L(3)}), L(4), L(5)}));
}

TEST(ParseLogic, ParenthesesGroup) {
  EXPECT_EQ(parse_logic("(Step 1 OR Step 2) AND Step 3"), And({Or({L(1), L(2)}), L(3)}));
  EXPECT_EQ(parse_logic("Step 1 AND (Step 2 OR Step 3)"), And({L(1), Or({L(2), L(3)})}));
}

TEST(ParseLogic, AndThenOrWithoutParentheses) {
  EXPECT_EQ(parse_logic("Step 1 AND Step 2 OR Step 3"), And({L(1), Or({L(2), L(3)})}));
}

TEST(ParseLogic, KeywordsAreCaseInsensitive) {
  EXPECT_EQ(parse_logic("step 1 and STEP 2 or Step 3"), And({L(1), Or({L(2), L(3)})}));
}

TEST(ParseLogic, RedundantParentheses) { EXPECT_EQ(parse_logic("((Step 2))"), L(2)); }

TEST(ParseLogic, DuplicateReferencesKept) {
  EXPECT_EQ(parse_logic("Step 1 OR Step 1"), Or({L(1), L(1)}));
}

TEST(ParseLogic, RejectsMalformedInput) {
  for (const char* bad : {"", "   ", "Step", "Step x", "(Step 1", "Step 1)", "Step 1 AND",
                          "OR Step 1", "Step 1 Step 2", "Step 1 XOR Step 2",
                          "Step 1 AND Step 2 then stop", "Step 0", "Step -1", "()"}) {
    EXPECT_THROW(parse_logic(bad), MalformedExpression) << bad;
  }
}

TEST(ParseLogic, ExecutionOrderPrefix) {
  auto e = parse_execution_order_line("execution order: Step 1 AND Step 2");
  ASSERT_TRUE(e);
  EXPECT_EQ(*e, And({L(1), L(2)}));
  EXPECT_FALSE(parse_execution_order_line("Step 1: get wood"));
}

TEST(FormatLogic, CanonicalForms) {
  EXPECT_EQ(format_logic(L(2)), "Step 2");
  EXPECT_EQ(format_logic(And({Or({L(1), L(2)}), L(3)})), "(Step 1 OR Step 2) AND Step 3");
  EXPECT_EQ(format_logic(Or({L(1), L(2), L(3)})), "Step 1 OR Step 2 OR Step 3");
}

TEST(FormatLogic, RoundTripsRandomExpressions) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    LogicExpr e = random_expr(rng, 6, 6);
    EXPECT_EQ(parse_logic(format_logic(e)), e) << format_logic(e);
  }
}

TEST(LogicExpr, RejectsSingleChildCompounds) {
  EXPECT_THROW(LogicExpr::all_of({L(1)}), std::invalid_argument);
  EXPECT_THROW(LogicExpr::any_of({}), std::invalid_argument);
}

TEST(EvaluateLazy, OrStopsAtFirstTrue) {
  std::vector<int> calls;
  auto r = evaluate_lazy(Or({L(1), L(2)}), [&](int id) {
    calls.push_back(id);
    return true;
  });
  EXPECT_TRUE(r.value);
  EXPECT_EQ(calls, std::vector<int>({1}));
}

TEST(EvaluateLazy, AndStopsAtFirstFalse) {
  std::vector<int> calls;
  auto r = evaluate_lazy(And({L(1), L(2), L(3)}), [&](int id) {
    calls.push_back(id);
    return id != 2;
  });
  EXPECT_FALSE(r.value);
  EXPECT_EQ(calls, std::vector<int>({1, 2}));
}

TEST(EvaluateLazy, NestedOrderIsLeftToRight) {
  std::vector<int> calls;
  auto r = evaluate_lazy(And({Or({L(1), L(2)}), L(3)}), [&](int id) {
    calls.push_back(id);
    return id != 1;
  });
  EXPECT_TRUE(r.value);
  EXPECT_EQ(calls, std::vector<int>({1, 2, 3}));
}

TEST(EvaluateLazy, ErrorsBecomeFalseWithCause) {
  auto r = evaluate_lazy(Or({L(1), L(2)}), [](int id) -> bool {
    if (id == 1) throw BudgetExhausted("out of calls");
    return false;
  });
  EXPECT_FALSE(r.value);
  ASSERT_TRUE(r.cause);
  EXPECT_NE(r.cause->find("out of calls"), std::string::npos);
}

TEST(EvaluateLazy, AgreesWithTruthTable) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    LogicExpr e = random_expr(rng, 4, 4);
    for (unsigned mask = 0; mask < 16; ++mask) {
      auto truth = [mask](int id) { return ((mask >> (id - 1)) & 1U) != 0; };
      EXPECT_EQ(evaluate_lazy(e, truth).value, brute_force(e, truth)) << format_logic(e);
    }
  }
}

TEST(LayerSplit, MixedOrderExample) {
  auto layers = layer_split(And({Or({L(1), L(2), L(3)}), L(4), L(5)}));
  ASSERT_EQ(layers.size(), 2u);
  EXPECT_EQ(layers[0].result_id, 6);
  EXPECT_EQ(layers[0].expr, Or({L(1), L(2), L(3)}));
  EXPECT_FALSE(layers[1].result_id);
  EXPECT_EQ(layers[1].expr, And({L(6), L(4), L(5)}));
}

TEST(LayerSplit, LeafStaysSingleLayer) {
  auto layers = layer_split(L(1));
  ASSERT_EQ(layers.size(), 1u);
  EXPECT_EQ(layers[0].expr, L(1));
}

TEST(LayerSplit, SiblingCompoundsGetConsecutiveIds) {
  auto layers = layer_split(Or({And({L(1), L(2)}), And({L(3), L(4)})}));
  ASSERT_EQ(layers.size(), 3u);
  EXPECT_EQ(layers[0].result_id, 5);
  EXPECT_EQ(layers[0].expr, And({L(1), L(2)}));
  EXPECT_EQ(layers[1].result_id, 6);
  EXPECT_EQ(layers[1].expr, And({L(3), L(4)}));
  EXPECT_EQ(layers[2].expr, Or({L(5), L(6)}));
}

TEST(LayerSplit, EveryLayerIsHomogeneous) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    for (const auto& layer : layer_split(random_expr(rng, 6, 5))) {
      EXPECT_TRUE(layer.expr.is_homogeneous());
    }
  }
}

TEST(LayerSplit, SyntheticIdsStartAfterPlanSize) {
  auto layers = layer_split(And({Or({L(1), L(2)}), L(3)}), 7);
  EXPECT_EQ(layers[0].result_id, 8);
}

TEST(LayerSplit, EagerAndLazySchedulesMatchTruthTable) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 300; ++i) {
    LogicExpr e = random_expr(rng, 4, 4);
    auto layers = layer_split(e, 4);
    for (unsigned mask = 0; mask < 16; ++mask) {
      auto truth = [mask](int id) { return ((mask >> (id - 1)) & 1U) != 0; };
      bool expected = brute_force(e, truth);
      EXPECT_EQ(evaluate_layers_eager(layers, truth), expected);
      EXPECT_EQ(evaluate_layers_lazy(layers, truth).value, expected);
    }
  }
}

TEST(LayerSplit, LazyScheduleCallsStepsInSameOrderAsUnsplit) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    LogicExpr e = random_expr(rng, 5, 5);
    unsigned mask = static_cast<unsigned>(rng() % 32);
    auto truth = [mask](int id) { return ((mask >> (id - 1)) & 1U) != 0; };
    std::vector<int> direct, layered;
    evaluate_lazy(e, [&](int id) {
      direct.push_back(id);
      return truth(id);
    });
    evaluate_layers_lazy(layer_split(e, 5), [&](int id) {
      layered.push_back(id);
      return truth(id);
    });
    EXPECT_EQ(direct, layered) << format_logic(e);
  }
}

}  // namespace
}  // namespace adapt
