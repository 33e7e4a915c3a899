#include "adapt/controller.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <map>

#include "adapt/errors.hpp"

namespace adapt {

namespace {

StringMap merged(const StringMap& base, const StringMap& over) {
  StringMap out = base;
  for (const auto& [k, v] : over) out[k] = v;
  return out;
}

int deepest_executor(const TaskNode& node) {
  int best = node.outcome ? node.depth : 0;
  for (const auto& c : node.children) best = std::max(best, deepest_executor(c));
  return best;
}

int contributing_depth(const TaskNode& node) {
  int best = node.outcome ? node.depth : 0;
  if (node.outcome && node.outcome->completed) return best;
  for (const auto& c : node.children) {
    if (c.result && !c.vacuous) best = std::max(best, contributing_depth(c));
  }
  return best;
}

}  // namespace

int ControllerConfig::effective_ceiling() const {
  return call_ceiling.value_or(d_max * executor.max_iterations + d_max);
}

void ControllerConfig::validate() const {
  if (d_max < 1) throw ConfigError("d_max must be >= 1");
  if (call_ceiling && *call_ceiling < 1) throw ConfigError("call ceiling must be >= 1");
  executor.validate();
  planner.validate();
}

StringMap propagate_context(std::string_view policy, const Environment& env,
                            const StringMap& parent_context) {
  if (policy == "textcraft") {
    StringMap state = env.salient_state();
    auto it = state.find("inventory");
    return {{"inventory", it == state.end() ? std::string() : it->second}};
  }
  if (policy == "generic") return parent_context;
  throw UnknownPolicy("unknown context policy '" + std::string(policy) + "'");
}

TaskNode adapt_run(std::string_view task, int k, const ControllerConfig& cfg,
                   EpisodeIO& io, const StringMap& context) {
  TaskNode node;
  node.task = std::string(task);
  node.depth = k;
  if (k > cfg.d_max) return node;

  StringMap incoming =
      merged(io.base_context, propagate_context(cfg.context_policy, io.env, context));
  node.outcome = run_executor(task, io.env, cfg.executor, io.executor, io.ledger, incoming,
                              ExecutorCall{k, std::nullopt, io.prompts});
  node.salient_context = node.outcome->salient_context;
  if (node.outcome->completed) {
    node.result = true;
    return node;
  }
  if (node.outcome->error) node.error = node.outcome->error;
  if (io.ledger.exhausted()) return node;

  try {
    node.plan = make_plan(task, incoming, cfg.planner, io.planner, io.ledger, k, io.prompts);
  } catch (const Error& e) {
    node.error = e.what();
    spdlog::debug("no plan for '{}' at depth {}: {}", task, k, e.what());
    return node;
  }

  for (const auto& step : node.plan->steps) {
    TaskNode child;
    child.task = step.description;
    child.depth = k + 1;
    child.step_id = step.id;
    node.children.push_back(std::move(child));
  }

  // Successful children feed their context forward; failed ones do not.
  StringMap running = context;
  std::map<int, bool> memo;
  EvalResult res = evaluate_lazy(node.plan->order, [&](int id) {
    if (auto it = memo.find(id); it != memo.end()) return it->second;
    TaskNode& slot = node.children[static_cast<size_t>(id - 1)];
    if (io.env.done()) {
      slot.vacuous = true;
      slot.result = true;
    } else {
      TaskNode child = adapt_run(slot.task, k + 1, cfg, io, running);
      child.step_id = id;
      slot = std::move(child);
      if (slot.result) running = merged(running, slot.salient_context);
    }
    memo[id] = slot.result;
    return slot.result;
  });
  node.result = res.value;
  if (res.cause) node.error = res.cause;
  if (node.result) node.salient_context = running;
  return node;
}

int compute_k_max(const TaskNode& root) {
  return root.result ? contributing_depth(root) : deepest_executor(root);
}

EpisodeResult run_adapt(std::string_view task, const ControllerConfig& cfg, EpisodeIO& io) {
  cfg.validate();
  io.base_context["observation"] = io.env.reset();
  io.ledger.set_ceiling(cfg.effective_ceiling());
  EpisodeResult out;
  out.strategy = "adapt";
  out.root = adapt_run(task, 1, cfg, io);
  out.gold_reward = io.env.gold_reward();
  out.self_reported_success = out.root.result;
  out.k_max = compute_k_max(out.root);
  out.ledger = io.ledger;
  return out;
}

}  // namespace adapt
