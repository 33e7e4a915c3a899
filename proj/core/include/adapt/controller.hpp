#pragma once

// As-needed decomposition: run the executor, and only when it reports
// failure ask the planner for sub-tasks and recurse on them one level
// deeper, combining their results with the plan's AND/OR order.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adapt/environment.hpp"
#include "adapt/executor.hpp"
#include "adapt/llm_backend.hpp"
#include "adapt/planner.hpp"

namespace adapt {

struct ControllerConfig {
  int d_max = 3;
  std::string context_policy = "textcraft";
  bool record_tree = true;
  ExecutorConfig executor;
  PlannerConfig planner;
  /// Defaults to d_max * executor.max_iterations + d_max.
  std::optional<int> call_ceiling;

  int effective_ceiling() const;
  /// Throws ConfigError.
  void validate() const;
};

struct TaskNode {
  std::string task;
  int depth = 1;
  /// Position in the parent's plan; empty for the root.
  std::optional<int> step_id;
  std::optional<ExecutionOutcome> outcome;
  std::optional<Plan> plan;
  /// One per plan step, in step order; unevaluated steps stay unexecuted.
  std::vector<TaskNode> children;
  bool result = false;
  /// Skipped because the episode goal was already reached.
  bool vacuous = false;
  std::optional<std::string> error;
  /// Context this node hands to later siblings when it succeeds.
  StringMap salient_context;

  bool executed() const { return outcome.has_value() || plan.has_value(); }
};

struct EpisodeResult {
  std::string strategy;
  TaskNode root;
  int gold_reward = 0;
  bool self_reported_success = false;
  int k_max = 0;
  int trials = 1;
  CallLedger ledger;
};

/// Everything one episode shares across its recursion.
struct EpisodeIO {
  Environment& env;
  LlmBackend& executor;
  LlmBackend& planner;
  CallLedger& ledger;
  const PromptLibrary* prompts = nullptr;
  /// Merged under every executor/planner context (e.g. the task's
  /// crafting commands).
  StringMap base_context;
};

/// "textcraft" returns the current inventory; "generic" passes the
/// parent's context through. Throws UnknownPolicy.
StringMap propagate_context(std::string_view policy, const Environment& env,
                            const StringMap& parent_context);

/// One call of the recursion at depth `k`. Beyond d_max it returns a failed
/// node without issuing any calls.
TaskNode adapt_run(std::string_view task, int k, const ControllerConfig& cfg,
                   EpisodeIO& io, const StringMap& context = {});

/// Deepest executor invocation on the branches that produced the result;
/// for a failed root, the deepest executor invocation anywhere.
int compute_k_max(const TaskNode& root);

/// Resets the environment and runs a full episode from depth 1.
EpisodeResult run_adapt(std::string_view task, const ControllerConfig& cfg, EpisodeIO& io);

}  // namespace adapt
