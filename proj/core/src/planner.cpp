#include "adapt/planner.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <charconv>

#include "adapt/errors.hpp"

namespace adapt {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string normalized(std::string_view s) {
  std::string out;
  bool space = false;
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(c));
  }
  while (!out.empty() && (out.back() == '.' || out.back() == ' ')) out.pop_back();
  return out;
}

// "Step <i>: <text>", case-insensitive keyword, optional markdown bullets.
std::optional<std::pair<int, std::string>> match_step(std::string_view line) {
  while (!line.empty() && (line.front() == '-' || line.front() == '*')) {
    line = trim(line.substr(1));
  }
  if (line.size() < 5) return std::nullopt;
  std::string head(line.substr(0, 4));
  std::transform(head.begin(), head.end(), head.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (head != "step") return std::nullopt;
  std::string_view rest = trim(line.substr(4));
  int id = 0;
  auto [p, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), id);
  if (ec != std::errc() || p == rest.data()) return std::nullopt;
  rest = trim(rest.substr(static_cast<size_t>(p - rest.data())));
  if (rest.empty() || rest.front() != ':') return std::nullopt;
  return std::pair{id, std::string(trim(rest.substr(1)))};
}

}  // namespace

const PlanStep& Plan::step(int id) const {
  if (id < 1 || static_cast<size_t>(id) > steps.size()) {
    throw std::out_of_range("no plan step " + std::to_string(id));
  }
  return steps[static_cast<size_t>(id - 1)];
}

void PlannerConfig::validate() const {
  if (min_steps < 1 || max_steps < min_steps) {
    throw ConfigError("planner step range must satisfy 1 <= min <= max");
  }
  if (max_parse_retries < 0) throw ConfigError("planner max_parse_retries must be >= 0");
}

Plan parse_plan(std::string_view raw) {
  Plan plan;
  plan.raw_text = std::string(raw);
  std::optional<LogicExpr> order;

  size_t offset = 0;
  while (offset <= raw.size()) {
    size_t nl = raw.find('\n', offset);
    std::string_view line = trim(raw.substr(
        offset, nl == std::string_view::npos ? std::string_view::npos : nl - offset));
    offset = nl == std::string_view::npos ? raw.size() + 1 : nl + 1;
    if (line.empty()) continue;

    try {
      if (auto expr = parse_execution_order_line(line)) {
        order = std::move(*expr);  // the last order line wins
        continue;
      }
    } catch (const MalformedExpression& e) {
      throw PlanParseFailure(std::string("bad execution order: ") + e.what());
    }

    auto m = match_step(line);
    if (!m) continue;
    auto [id, text] = std::move(*m);
    if (id != static_cast<int>(plan.steps.size()) + 1) {
      throw PlanParseFailure("step ids must run 1..n in order; got Step " +
                             std::to_string(id) + " after " +
                             std::to_string(plan.steps.size()) + " steps");
    }
    if (text.empty()) {
      throw PlanParseFailure("Step " + std::to_string(id) + " has no description");
    }
    if (text.size() > kMaxStepChars) {
      text.resize(kMaxStepChars);
      text += "...";
      plan.warnings.push_back("Step " + std::to_string(id) + " truncated");
    }
    plan.steps.push_back({id, std::move(text)});
  }

  if (plan.steps.empty()) throw PlanParseFailure("no steps found in plan");
  const int n = static_cast<int>(plan.steps.size());
  if (!order) {
    if (n == 1) {
      order = LogicExpr::leaf(1);
    } else {
      std::vector<LogicExpr> all;
      for (int i = 1; i <= n; ++i) all.push_back(LogicExpr::leaf(i));
      order = LogicExpr::all_of(std::move(all));
    }
    plan.warnings.push_back("missing execution order; defaulting to AND over all steps");
  }
  for (int id : order->leaves()) {
    if (id < 1 || id > n) {
      throw PlanParseFailure("execution order references missing Step " +
                             std::to_string(id));
    }
  }
  plan.order = std::move(*order);
  return plan;
}

Plan make_plan(std::string_view task, const StringMap& context,
               const PlannerConfig& cfg, LlmBackend& backend, CallLedger& ledger,
               int depth, const PromptLibrary* prompts) {
  cfg.validate();
  const PromptLibrary& lib = prompts ? *prompts : PromptLibrary::builtin();
  const std::string& tmpl = lib.get(cfg.prompt_template);
  const std::string demos_id = cfg.prompt_template + ".demos";
  const BackendConfig& bcfg = backend.config();

  GenRequest req;
  req.messages.push_back(
      {Role::kUser,
       render_template(tmpl, {{"task", std::string(task)},
                              {"context", render_context(context)},
                              {"demos", lib.has(demos_id) ? lib.get(demos_id) : ""}})});
  req.temperature = bcfg.default_temperature;
  req.max_tokens = bcfg.max_tokens;
  req.hint = ScriptHint{Module::kPlanner, std::string(task), {}, context, cfg.detail};

  std::string last_error;
  for (int attempt = 0; attempt <= cfg.max_parse_retries; ++attempt) {
    GenResponse resp = generate(backend, req, ledger, {Module::kPlanner, depth});
    Plan plan;
    try {
      plan = parse_plan(resp.text);
    } catch (const PlanParseFailure& e) {
      last_error = e.what();
      spdlog::debug("plan parse failed (attempt {}): {}", attempt + 1, e.what());
      continue;
    }
    if (plan.steps.size() == 1 && normalized(plan.steps[0].description) == normalized(task)) {
      throw DegeneratePlan("planner returned the task itself: " + std::string(task));
    }
    const int n = static_cast<int>(plan.steps.size());
    if (n < cfg.min_steps || n > cfg.max_steps) {
      plan.warnings.push_back(std::to_string(n) + " steps, outside the usual " +
                              std::to_string(cfg.min_steps) + "-" +
                              std::to_string(cfg.max_steps));
    }
    for (const auto& w : plan.warnings) spdlog::debug("plan for '{}': {}", task, w);
    return plan;
  }
  throw PlanParseFailure("planner output unusable after " +
                         std::to_string(cfg.max_parse_retries + 1) +
                         " attempts: " + last_error);
}

}  // namespace adapt
