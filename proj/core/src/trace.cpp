#include "adapt/trace.hpp"

#include <json.hpp>

namespace adapt {

using nlohmann::json;

namespace {

json to_json(const ExecutionOutcome& o) {
  json steps = json::array();
  for (const auto& s : o.trajectory) {
    steps.push_back({{"kind", std::string(to_string(s.kind))},
                     {"text", s.text},
                     {"iteration", s.iteration}});
  }
  json j{{"completed", o.completed},
         {"termination", std::string(to_string(o.termination))},
         {"llm_calls", o.llm_calls_used},
         {"trajectory", std::move(steps)}};
  if (o.error) j["error"] = *o.error;
  if (!o.audit.empty()) j["audit"] = o.audit;
  return j;
}

json to_json(const TaskNode& n) {
  json j{{"task", n.task}, {"depth", n.depth}, {"result", n.result}};
  if (n.step_id) j["step_id"] = *n.step_id;
  if (n.vacuous) j["vacuous"] = true;
  if (n.error) j["error"] = *n.error;
  if (n.outcome) j["executor"] = to_json(*n.outcome);
  if (n.plan) {
    json steps = json::array();
    for (const auto& s : n.plan->steps) steps.push_back(s.description);
    j["plan"] = {{"steps", std::move(steps)},
                 {"order", format_logic(n.plan->order)},
                 {"warnings", n.plan->warnings}};
    json kids = json::array();
    for (const auto& c : n.children) {
      kids.push_back(c.executed() || c.vacuous ? to_json(c)
                                               : json{{"task", c.task},
                                                      {"depth", c.depth},
                                                      {"step_id", c.step_id.value_or(0)},
                                                      {"executed", false}});
    }
    j["children"] = std::move(kids);
  }
  return j;
}

}  // namespace

std::string trace_json(const TaskNode& root, int indent) {
  return to_json(root).dump(indent);
}

std::string trace_json(const EpisodeResult& e, int indent) {
  json j{{"strategy", e.strategy},
         {"gold_reward", e.gold_reward},
         {"self_reported_success", e.self_reported_success},
         {"k_max", e.k_max},
         {"trials", e.trials},
         {"calls",
          {{"total", e.ledger.total_calls()},
           {"executor", e.ledger.executor_calls()},
           {"planner", e.ledger.planner_calls()}}},
         {"root", to_json(e.root)}};
  return j.dump(indent);
}

}  // namespace adapt
