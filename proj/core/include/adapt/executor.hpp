#pragma once

// Think/act/observe loop for one (sub-)task. The verdict comes from the
// model itself ("task completed" / "task failed"), never from the
// environment's reward.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adapt/environment.hpp"
#include "adapt/llm_backend.hpp"
#include "adapt/prompts.hpp"
#include "adapt/trajectory.hpp"

namespace adapt {

struct ExecutorConfig {
  int max_iterations = 20;
  std::string prompt_template = "textcraft_executor";
  std::string thought_prefix = "think:";
  std::string action_prefix = "action:";
  std::string completed_marker = "task completed";
  std::string failed_marker = "task failed";

  /// Throws ConfigError.
  void validate() const;
};

enum class Termination { kDeclaredCompleted, kDeclaredFailed, kBudgetExhausted };
std::string_view to_string(Termination t);

struct ParsedStep {
  std::optional<std::string> thought;
  std::optional<std::string> action;
  std::optional<Verdict> verdict;
  /// Both markers were present; the earlier one was kept.
  bool conflicting_markers = false;

  bool empty() const { return !action && !verdict; }
};

/// Markers are matched case-insensitively anywhere outside action lines
/// and take priority over any action in the same generation.
ParsedStep parse_step(std::string_view model_text, const ExecutorConfig& cfg);

struct ExecutionOutcome {
  bool completed = false;
  Trajectory trajectory;
  int llm_calls_used = 0;
  StringMap salient_context;
  Termination termination = Termination::kBudgetExhausted;
  std::optional<std::string> error;
  std::vector<std::string> audit;
};

struct ExecutorCall {
  int depth = 1;
  /// Overrides the backend's default sampling temperature.
  std::optional<double> temperature;
  const PromptLibrary* prompts = nullptr;
};

/// Never resets `env`. Backend failures end the run as budget_exhausted
/// with `error` set.
ExecutionOutcome run_executor(std::string_view task, Environment& env,
                              const ExecutorConfig& cfg, LlmBackend& backend,
                              CallLedger& ledger, const StringMap& context,
                              const ExecutorCall& call = {});

}  // namespace adapt
