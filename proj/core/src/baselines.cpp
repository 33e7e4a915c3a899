#include "adapt/baselines.hpp"

#include <spdlog/spdlog.h>

#include <map>

#include "adapt/errors.hpp"

namespace adapt {

namespace {

StringMap merged(const StringMap& base, const StringMap& over) {
  StringMap out = base;
  for (const auto& [k, v] : over) out[k] = v;
  return out;
}

void begin_episode(const StrategyConfig& cfg, EpisodeIO& io) {
  cfg.validate();
  io.base_context["observation"] = io.env.reset();
  io.ledger.set_ceiling(cfg.controller.effective_ceiling());
}

void finish(EpisodeResult& out, EpisodeIO& io) {
  out.gold_reward = io.env.gold_reward();
  out.ledger = io.ledger;
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kExecutorOnly: return "executor_only";
    case Strategy::kPlanAndExecute: return "plan_and_execute";
    case Strategy::kTryAgain: return "try_again";
    case Strategy::kAdapt: return "adapt";
  }
  return "?";
}

Strategy strategy_from_string(std::string_view s) {
  for (Strategy v : {Strategy::kExecutorOnly, Strategy::kPlanAndExecute, Strategy::kTryAgain,
                     Strategy::kAdapt}) {
    if (to_string(v) == s) return v;
  }
  if (s == "react") return Strategy::kExecutorOnly;
  throw ConfigError("unknown strategy '" + std::string(s) + "'");
}

void StrategyConfig::validate() const {
  controller.validate();
  detailed_planner.validate();
  if (retry_temperature < 0.0 || retry_temperature > 2.0) {
    throw ConfigError("retry temperature must lie in [0, 2]");
  }
}

EpisodeResult run_executor_only(std::string_view task, const StrategyConfig& cfg,
                                EpisodeIO& io) {
  begin_episode(cfg, io);
  const ControllerConfig& cc = cfg.controller;
  ExecutorConfig ecfg = cc.executor;
  ecfg.max_iterations *= cc.d_max;

  EpisodeResult out;
  out.strategy = std::string(to_string(Strategy::kExecutorOnly));
  out.root.task = std::string(task);
  StringMap ctx = merged(io.base_context, propagate_context(cc.context_policy, io.env, {}));
  out.root.outcome = run_executor(task, io.env, ecfg, io.executor, io.ledger, ctx,
                                  ExecutorCall{1, std::nullopt, io.prompts});
  out.root.result = out.root.outcome->completed;
  out.root.error = out.root.outcome->error;
  out.self_reported_success = out.root.result;
  out.k_max = 1;
  finish(out, io);
  return out;
}

EpisodeResult run_plan_and_execute(std::string_view task, const StrategyConfig& cfg,
                                   EpisodeIO& io) {
  begin_episode(cfg, io);
  const ControllerConfig& cc = cfg.controller;
  EpisodeResult out;
  out.strategy = std::string(to_string(Strategy::kPlanAndExecute));
  out.root.task = std::string(task);

  StringMap ctx = merged(io.base_context, propagate_context(cc.context_policy, io.env, {}));
  try {
    out.root.plan = make_plan(task, ctx, cfg.detailed_planner, io.planner, io.ledger, 1,
                              io.prompts);
  } catch (const Error& e) {
    out.root.error = e.what();
    finish(out, io);
    return out;
  }

  for (const auto& step : out.root.plan->steps) {
    TaskNode child;
    child.task = step.description;
    child.depth = 2;
    child.step_id = step.id;
    out.root.children.push_back(std::move(child));
  }

  StringMap running;
  std::map<int, bool> memo;
  auto layers = layer_split(out.root.plan->order,
                            static_cast<int>(out.root.plan->steps.size()));
  EvalResult res = evaluate_layers_lazy(layers, [&](int id) {
    if (auto it = memo.find(id); it != memo.end()) return it->second;
    TaskNode& node = out.root.children[static_cast<size_t>(id - 1)];
    if (io.env.done()) {
      node.vacuous = true;
      node.result = true;
    } else {
      StringMap incoming =
          merged(io.base_context, propagate_context(cc.context_policy, io.env, running));
      node.outcome = run_executor(node.task, io.env, cc.executor, io.executor, io.ledger,
                                  incoming, ExecutorCall{2, std::nullopt, io.prompts});
      node.result = node.outcome->completed;
      node.error = node.outcome->error;
      node.salient_context = node.outcome->salient_context;
      if (node.result) running = merged(running, node.salient_context);
    }
    memo[id] = node.result;
    return node.result;
  });
  out.root.result = res.value;
  if (res.cause) out.root.error = res.cause;
  out.self_reported_success = out.root.result;
  out.k_max = compute_k_max(out.root);
  finish(out, io);
  return out;
}

EpisodeResult run_try_again(std::string_view task, const StrategyConfig& cfg,
                            EpisodeIO& io) {
  cfg.validate();
  const ControllerConfig& cc = cfg.controller;
  io.ledger.set_ceiling(cc.effective_ceiling());

  EpisodeResult out;
  out.strategy = std::string(to_string(Strategy::kTryAgain));
  out.trials = 0;
  for (int trial = 1; trial <= cc.d_max; ++trial) {
    io.base_context["observation"] = io.env.reset();
    ++out.trials;
    TaskNode node;
    node.task = std::string(task);
    StringMap ctx = merged(io.base_context, propagate_context(cc.context_policy, io.env, {}));
    std::optional<double> temp;
    if (trial > 1) temp = cfg.retry_temperature;
    node.outcome = run_executor(task, io.env, cc.executor, io.executor, io.ledger, ctx,
                                ExecutorCall{1, temp, io.prompts});
    node.result = node.outcome->completed;
    node.error = node.outcome->error;
    out.root = std::move(node);
    out.gold_reward = io.env.gold_reward();
    if (out.gold_reward == 1 || io.ledger.exhausted()) break;
  }
  out.self_reported_success = out.root.result;
  out.k_max = 1;
  out.ledger = io.ledger;
  return out;
}

EpisodeResult run_strategy(std::string_view task, const StrategyConfig& cfg, EpisodeIO& io) {
  switch (cfg.strategy) {
    case Strategy::kExecutorOnly: return run_executor_only(task, cfg, io);
    case Strategy::kPlanAndExecute: return run_plan_and_execute(task, cfg, io);
    case Strategy::kTryAgain: return run_try_again(task, cfg, io);
    case Strategy::kAdapt: return run_adapt(task, cfg.controller, io);
  }
  throw ConfigError("unhandled strategy");
}

}  // namespace adapt
