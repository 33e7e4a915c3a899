#pragma once

// Deterministic stand-ins for the executor and planner LLMs on TextCraft.
// The executor derives its moves from a crafting oracle and succeeds only
// when a sub-task needs at most `competence` craft actions; the planner
// decomposes a goal along its shallowest recipe.

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "adapt/llm_backend.hpp"
#include "adapt/textcraft.hpp"

namespace adapt {

struct GoalForm {
  std::string verb;  // craft | obtain | get | fetch
  int count = 1;
  std::string name;  // resolved item or tag name
  bool directly = false;
};

/// Understands "craft beehive", "obtain 6 planks",
/// "fetch 2 stick directly", "craft 1 beehive using ...". Throws
/// UnknownGoalForm.
GoalForm parse_goal(const textcraft::RecipeBook& book, std::string_view task);

struct ScriptedStep {
  std::string thought;
  std::optional<std::string> action;
  std::optional<Verdict> verdict;

  /// "think: ...\naction: ..." or "think: ...\ntask completed".
  std::string render() const;
};

/// Next move given the sub-task and everything observed so far. The
/// starting inventory comes from `context["inventory"]`, or from an
/// initial `inventory` action when the context lacks it.
ScriptedStep scripted_executor_step(const ScriptedPolicyConfig& policy,
                                    const textcraft::RecipeBook& book,
                                    std::string_view task,
                                    const Trajectory& history,
                                    const StringMap& context = {},
                                    bool misdeclare = false);

/// Plan text in the "Step i: ..." / "Execution Order: ..." format. Throws
/// NoRecipeKnown when the goal has no recipe.
std::string scripted_planner_plan(const ScriptedPolicyConfig& policy,
                                  const textcraft::RecipeBook& book,
                                  std::string_view task,
                                  PlanDetail detail = PlanDetail::kAbstract);

/// Whether episode `ordinal` is one whose failures get reported as
/// successes; selects exactly floor(n * rate) of any n consecutive
/// ordinals starting at 0.
bool misdeclares(double rate, uint64_t ordinal);

class ScriptedBackend : public LlmBackend {
 public:
  ScriptedBackend(BackendConfig cfg,
                  std::shared_ptr<const textcraft::RecipeBook> book,
                  uint64_t episode_ordinal = 0);

  GenResponse complete(const GenRequest& req) override;
  const BackendConfig& config() const override { return cfg_; }

 private:
  BackendConfig cfg_;
  std::shared_ptr<const textcraft::RecipeBook> book_;
  bool misdeclare_;
};

}  // namespace adapt
