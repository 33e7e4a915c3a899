#pragma once

// Decomposes a failed task into numbered steps plus an execution-order
// expression, parsed from "Step <i>: ..." lines and a final
// "Execution Order: ..." line.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adapt/environment.hpp"
#include "adapt/llm_backend.hpp"
#include "adapt/plan_logic.hpp"
#include "adapt/prompts.hpp"

namespace adapt {

struct PlanStep {
  int id = 0;
  std::string description;

  bool operator==(const PlanStep&) const = default;
};

struct Plan {
  std::vector<PlanStep> steps;
  LogicExpr order = LogicExpr::leaf(1);
  std::string raw_text;
  std::vector<std::string> warnings;

  /// Throws std::out_of_range.
  const PlanStep& step(int id) const;
};

struct PlannerConfig {
  std::string prompt_template = "textcraft_planner";
  int min_steps = 3;
  int max_steps = 5;
  int max_parse_retries = 1;
  PlanDetail detail = PlanDetail::kAbstract;

  /// Throws ConfigError.
  void validate() const;
};

inline constexpr size_t kMaxStepChars = 500;

/// Throws PlanParseFailure. A missing order line defaults to AND over all
/// steps and adds a warning.
Plan parse_plan(std::string_view raw);

/// One planner call per attempt, retrying parse failures up to
/// `max_parse_retries` times. Throws PlanParseFailure once retries run
/// out, DegeneratePlan (no retry) when the only step restates the task,
/// and BackendError subclasses from the backend.
Plan make_plan(std::string_view task, const StringMap& context,
               const PlannerConfig& cfg, LlmBackend& backend, CallLedger& ledger,
               int depth = 1, const PromptLibrary* prompts = nullptr);

}  // namespace adapt
