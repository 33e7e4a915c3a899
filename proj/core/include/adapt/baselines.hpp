#pragma once

// Comparable-budget alternatives to ADaPT: one long executor run, a single
// up-front detailed plan, and repeated independent trials.

#include <string>
#include <string_view>

#include "adapt/controller.hpp"

namespace adapt {

enum class Strategy { kExecutorOnly, kPlanAndExecute, kTryAgain, kAdapt };
std::string_view to_string(Strategy s);
/// Throws ConfigError.
Strategy strategy_from_string(std::string_view s);

struct StrategyConfig {
  Strategy strategy = Strategy::kAdapt;
  double retry_temperature = 0.7;
  /// d_max, executor and planner settings, context policy and ceiling.
  ControllerConfig controller;
  /// Planner settings for plan-and-execute.
  PlannerConfig detailed_planner{"textcraft_planner_detailed", 1, 20, 1,
                                 PlanDetail::kDetailed};

  void validate() const;
};

/// Executor iterations scaled by d_max; k_max is 1.
EpisodeResult run_executor_only(std::string_view task, const StrategyConfig& cfg,
                                EpisodeIO& io);

/// Plans once with the detailed template, runs each referenced step once
/// at depth 2 and combines them through the layered order.
EpisodeResult run_plan_and_execute(std::string_view task, const StrategyConfig& cfg,
                                   EpisodeIO& io);

/// Up to d_max full-task trials on a freshly reset environment, retries at
/// `retry_temperature`, stopping at the first gold success. Reports that
/// trial, else the last.
EpisodeResult run_try_again(std::string_view task, const StrategyConfig& cfg,
                            EpisodeIO& io);

EpisodeResult run_strategy(std::string_view task, const StrategyConfig& cfg, EpisodeIO& io);

}  // namespace adapt
