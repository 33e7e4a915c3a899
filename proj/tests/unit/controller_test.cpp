#include <gtest/gtest.h>

#include "adapt/controller.hpp"
#include "adapt/errors.hpp"
#include "test_support.hpp"

namespace adapt {
namespace {

using testing::FunctionBackend;
using testing::minibook;
using testing::RecordingEnv;
using testing::run_scripted;

struct Scripted {
  explicit Scripted(const char* target, int competence = 1)
      : book(minibook()), task(textcraft::build_task(target, *book, 0)), env(book, task) {
    BackendConfig bc;
    bc.scripted.competence = competence;
    executor = make_backend(bc, book);
    planner = make_backend(bc, book);
  }
  EpisodeIO io() { return EpisodeIO{env, *executor, *planner, ledger, nullptr, {}}; }

  std::shared_ptr<const textcraft::RecipeBook> book;
  textcraft::TaskInstance task;
  textcraft::TextCraftEnv env;
  std::unique_ptr<LlmBackend> executor, planner;
  CallLedger ledger;
};

ControllerConfig with_depth(int d) {
  ControllerConfig c;
  c.d_max = d;
  return c;
}

void check_consistency(const TaskNode& n, int d_max) {
  if (n.depth > d_max) {
    EXPECT_FALSE(n.outcome) << n.task;
  }
  if (!n.plan) {
    EXPECT_TRUE(n.children.empty());
    if (n.outcome && !n.vacuous) {
      EXPECT_EQ(n.result, n.outcome->completed);
    }
    return;
  }
  EXPECT_EQ(n.children.size(), n.plan->steps.size());
  for (const auto& c : n.children) {
    EXPECT_EQ(c.depth, n.depth + 1);
    check_consistency(c, d_max);
  }
  // Unevaluated children count as false; lazy evaluation never reads them.
  auto truth = [&](int id) { return n.children[static_cast<size_t>(id - 1)].result; };
  bool recomputed = evaluate_lazy(n.plan->order, truth).value;
  if (!n.outcome || !n.outcome->completed) EXPECT_EQ(recomputed, n.result) << n.task;
}

TEST(Controller, BaseCaseMakesNoCalls) {
  Scripted s("beehive");
  auto io = s.io();
  TaskNode n = adapt_run("craft beehive", 4, with_depth(3), io);
  EXPECT_FALSE(n.result);
  EXPECT_FALSE(n.outcome);
  EXPECT_EQ(s.ledger.total_calls(), 0);
}

TEST(Controller, BeehiveDecomposesOnce) {
  Scripted s("beehive");
  auto io = s.io();
  EpisodeResult r = run_adapt(s.task.goal, with_depth(3), io);
  EXPECT_TRUE(r.root.result);
  EXPECT_EQ(r.gold_reward, 1);
  EXPECT_EQ(r.k_max, 2);
  ASSERT_TRUE(r.root.plan);
  ASSERT_EQ(r.root.children.size(), 3u);
  for (const auto& c : r.root.children) {
    EXPECT_TRUE(c.result);
    EXPECT_FALSE(c.plan);
  }
  EXPECT_EQ(r.ledger.planner_calls(), 1);
  check_consistency(r.root, 3);
}

TEST(Controller, DepthOneCannotDecompose) {
  Scripted s("beehive");
  auto io = s.io();
  EpisodeResult r = run_adapt(s.task.goal, with_depth(1), io);
  EXPECT_FALSE(r.root.result);
  EXPECT_EQ(r.gold_reward, 0);
  EXPECT_EQ(r.k_max, 1);
  // The planner still runs at the last level; its steps hit the depth limit.
  ASSERT_TRUE(r.root.plan);
  for (const auto& c : r.root.children) EXPECT_FALSE(c.executed());
  EXPECT_EQ(r.ledger.planner_calls(), 1);
}

TEST(Controller, NoPlanningWhenExecutorSucceeds) {
  Scripted s("oak planks");
  auto io = s.io();
  EpisodeResult r = run_adapt(s.task.goal, with_depth(4), io);
  EXPECT_TRUE(r.root.result);
  EXPECT_EQ(r.ledger.planner_calls(), 0);
  EXPECT_EQ(r.k_max, 1);
}

TEST(Controller, DepthThreeRecipeUsesThreeLevels) {
  for (const char* target : {"torch", "stone pickaxe", "bookshelf"}) {
    Scripted s(target);
    auto io = s.io();
    EpisodeResult r = run_adapt(s.task.goal, with_depth(4), io);
    EXPECT_EQ(r.gold_reward, 1) << target;
    EXPECT_EQ(r.k_max, 3) << target;
    check_consistency(r.root, 4);
  }
}

TEST(Controller, LazyOrLeavesLaterStepsUnexecuted) {
  RecordingEnv env;
  FunctionBackend executor([](const GenRequest& req) {
    const std::string& t = req.hint->task;
    if (t == "root") return std::string("task failed");
    return std::string("action: ") + t + "\ntask completed";
  });
  FunctionBackend planner([](const GenRequest&) {
    return std::string("Step 1: first\nStep 2: second\nExecution Order: Step 1 OR Step 2");
  });
  CallLedger ledger;
  EpisodeIO io{env, executor, planner, ledger, nullptr, {}};
  ControllerConfig cfg = with_depth(2);
  cfg.context_policy = "generic";
  TaskNode n = adapt_run("root", 1, cfg, io);
  EXPECT_TRUE(n.result);
  EXPECT_TRUE(n.children[0].executed());
  EXPECT_FALSE(n.children[1].executed());
  EXPECT_FALSE(n.children[1].outcome);
}

TEST(Controller, OnlySuccessfulSiblingsPassContext) {
  RecordingEnv env;
  FunctionBackend executor([](const GenRequest& req) {
    const std::string& t = req.hint->task;
    if (t == "root") return std::string("task failed");
    if (req.hint->transcript.empty()) return "action: " + t + "-move";
    return std::string(t == "bad" ? "task failed" : "task completed");
  });
  FunctionBackend planner([](const GenRequest&) {
    return std::string(
        "Step 1: bad\nStep 2: good\nStep 3: last\nExecution Order: (Step 1 OR Step 2) AND Step 3");
  });
  CallLedger ledger;
  EpisodeIO io{env, executor, planner, ledger, nullptr, {}};
  ControllerConfig cfg = with_depth(2);
  cfg.context_policy = "generic";
  TaskNode n = adapt_run("root", 1, cfg, io, {{"last_action", "start"}});
  EXPECT_TRUE(n.result);
  std::map<std::string, StringMap> seen;
  for (const auto& r : executor.requests) seen[r.hint->task] = r.hint->context;
  EXPECT_EQ(seen["bad"].at("last_action"), "start");
  EXPECT_EQ(seen["good"].at("last_action"), "start");  // same input as its Or sibling
  EXPECT_EQ(seen["last"].at("last_action"), "good-move");
}

TEST(Controller, GoalReachedMarksRemainingStepsVacuous) {
  auto book = minibook();
  auto task = textcraft::build_task("beehive", *book, 0);
  textcraft::TextCraftEnv env(book, task);
  auto gold = textcraft::oracle_solve(task, *book);
  FunctionBackend executor([&](const GenRequest& req) {
    if (req.hint->task != "do everything") return std::string("task failed");
    size_t done = 0;
    for (const auto& s : req.hint->transcript) done += s.kind == StepKind::kAction;
    if (done < gold.size()) return "action: " + gold[done];
    return std::string("task completed");
  });
  FunctionBackend planner([](const GenRequest&) {
    return std::string("Step 1: do everything\nStep 2: polish it\nExecution Order: Step 1 AND Step 2");
  });
  CallLedger ledger;
  EpisodeIO io{env, executor, planner, ledger, nullptr, {}};
  EpisodeResult r = run_adapt(task.goal, with_depth(3), io);
  EXPECT_TRUE(r.root.result);
  EXPECT_EQ(r.gold_reward, 1);
  EXPECT_TRUE(r.root.children[1].vacuous);
  EXPECT_TRUE(r.root.children[1].result);
  EXPECT_FALSE(r.root.children[1].outcome);
}

TEST(Controller, PlanFailureFailsNode) {
  RecordingEnv env;
  FunctionBackend executor([](const GenRequest&) { return std::string("task failed"); });
  FunctionBackend planner([](const GenRequest&) { return std::string("no idea"); });
  CallLedger ledger;
  EpisodeIO io{env, executor, planner, ledger, nullptr, {}};
  ControllerConfig cfg = with_depth(3);
  cfg.context_policy = "generic";
  TaskNode n = adapt_run("root", 1, cfg, io);
  EXPECT_FALSE(n.result);
  EXPECT_FALSE(n.plan);
  EXPECT_TRUE(n.error);
  EXPECT_EQ(ledger.planner_calls(), 2);  // one retry by default
}

TEST(Controller, CeilingFailsPendingNodes) {
  Scripted s("lantern");
  auto io = s.io();
  ControllerConfig cfg = with_depth(4);
  cfg.call_ceiling = 6;
  EpisodeResult r = run_adapt(s.task.goal, cfg, io);
  EXPECT_FALSE(r.root.result);
  EXPECT_LE(r.ledger.total_calls(), 6);
}

TEST(Controller, MonotoneInDepth) {
  for (const auto& task : textcraft::generate_tasks(*minibook(), {1, 4, 0, 77, 10})) {
    bool prev = false;
    for (int d = 1; d <= 5; ++d) {
      bool ok = run_scripted(task.target, Strategy::kAdapt, d, 1).gold_reward == 1;
      if (prev) EXPECT_TRUE(ok) << task.id << " d_max=" << d;
      prev = ok;
    }
  }
}

TEST(PropagateContext, Policies) {
  auto book = minibook();
  textcraft::TextCraftEnv env(book, textcraft::build_task("stick", *book, 0));
  env.reset();
  env.step("get 1 oak log");
  env.step("craft 4 oak planks using 1 oak log");
  EXPECT_EQ(propagate_context("textcraft", env, {{"x", "y"}}),
            (StringMap{{"inventory", "[oak planks] (4)"}}));
  StringMap parent{{"last_action", "open drawer"}};
  EXPECT_EQ(propagate_context("generic", env, parent), parent);
  EXPECT_THROW(propagate_context("webshop", env, parent), UnknownPolicy);
}

TEST(ComputeKMax, FailedEpisodeUsesDeepestExecutor) {
  TaskNode root;
  root.outcome = ExecutionOutcome{};
  root.plan = Plan{};
  TaskNode child;
  child.depth = 2;
  child.outcome = ExecutionOutcome{};
  root.children.push_back(child);
  EXPECT_EQ(compute_k_max(root), 2);
}

}  // namespace
}  // namespace adapt
