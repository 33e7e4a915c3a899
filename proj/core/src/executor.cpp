#include "adapt/executor.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>

#include "adapt/errors.hpp"

namespace adapt {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  return !prefix.empty() && s.size() >= prefix.size() &&
         lower(s.substr(0, prefix.size())) == lower(prefix);
}

}  // namespace

void ExecutorConfig::validate() const {
  if (max_iterations < 1) throw ConfigError("executor max_iterations must be >= 1");
  if (completed_marker.empty() || failed_marker.empty()) {
    throw ConfigError("executor markers must be non-empty");
  }
  if (lower(completed_marker) == lower(failed_marker)) {
    throw ConfigError("executor markers must differ");
  }
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::kDeclaredCompleted: return "declared_completed";
    case Termination::kDeclaredFailed: return "declared_failed";
    case Termination::kBudgetExhausted: return "budget_exhausted";
  }
  return "?";
}

ParsedStep parse_step(std::string_view model_text, const ExecutorConfig& cfg) {
  ParsedStep out;
  const std::string done = lower(cfg.completed_marker);
  const std::string failed = lower(cfg.failed_marker);
  size_t best = std::string::npos;  // global offset of the earliest marker
  bool saw_done = false, saw_failed = false;

  size_t offset = 0;
  while (offset <= model_text.size()) {
    size_t nl = model_text.find('\n', offset);
    std::string_view raw = model_text.substr(
        offset, nl == std::string_view::npos ? std::string_view::npos : nl - offset);
    std::string_view line = trim(raw);
    size_t line_start = offset + static_cast<size_t>(line.data() - raw.data());
    offset = nl == std::string_view::npos ? model_text.size() + 1 : nl + 1;
    if (line.empty()) continue;

    if (starts_with_ci(line, cfg.action_prefix) || line.front() == '>') {
      size_t cut = line.front() == '>' ? 1 : cfg.action_prefix.size();
      std::string_view act = trim(line.substr(cut));
      if (!out.action && !act.empty()) out.action = std::string(act);
      continue;
    }

    std::string low = lower(line);
    for (auto [marker, verdict, seen] :
         {std::tuple{&done, Verdict::kCompleted, &saw_done},
          std::tuple{&failed, Verdict::kFailed, &saw_failed}}) {
      auto pos = low.find(*marker);
      if (pos == std::string::npos) continue;
      *seen = true;
      if (best == std::string::npos || line_start + pos < best) {
        best = line_start + pos;
        out.verdict = verdict;
      }
    }

    if (starts_with_ci(line, cfg.thought_prefix)) {
      std::string_view thought = trim(line.substr(cfg.thought_prefix.size()));
      if (!out.thought) {
        out.thought = std::string(thought);
      } else {
        *out.thought += " " + std::string(thought);
      }
    } else if (!out.thought) {
      out.thought = std::string(line);
    } else {
      *out.thought += " " + std::string(line);
    }
  }
  out.conflicting_markers = saw_done && saw_failed;
  if (out.verdict) out.action.reset();
  return out;
}

ExecutionOutcome run_executor(std::string_view task, Environment& env,
                              const ExecutorConfig& cfg, LlmBackend& backend,
                              CallLedger& ledger, const StringMap& context,
                              const ExecutorCall& call) {
  cfg.validate();
  const PromptLibrary& lib = call.prompts ? *call.prompts : PromptLibrary::builtin();
  const std::string& tmpl = lib.get(cfg.prompt_template);
  const std::string demos_id = cfg.prompt_template + ".demos";
  const std::string demos = lib.has(demos_id) ? lib.get(demos_id) : std::string();
  const BackendConfig& bcfg = backend.config();

  ExecutionOutcome out;
  std::optional<std::string> last_action;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    GenRequest req;
    std::string prompt = render_template(
        tmpl, {{"task", std::string(task)},
               {"context", render_context(context)},
               {"demos", demos},
               {"trajectory", render_trajectory(out.trajectory, cfg.thought_prefix,
                                                cfg.action_prefix)}});
    req.messages.push_back({Role::kUser, std::move(prompt)});
    req.temperature = call.temperature.value_or(bcfg.default_temperature);
    req.max_tokens = bcfg.max_tokens;
    req.stop_sequences = bcfg.stop_sequences;
    req.hint = ScriptHint{Module::kExecutor, std::string(task), out.trajectory, context,
                          PlanDetail::kAbstract};

    GenResponse resp;
    try {
      resp = generate(backend, req, ledger, {Module::kExecutor, call.depth});
    } catch (const BudgetExhausted& e) {
      out.error = e.what();
      break;
    } catch (const BackendError& e) {
      ++out.llm_calls_used;  // the failed call was still recorded
      out.error = e.what();
      spdlog::warn("executor call failed at depth {}: {}", call.depth, e.what());
      break;
    }
    ++out.llm_calls_used;

    ParsedStep step = parse_step(resp.text, cfg);
    if (step.thought) out.trajectory.push_back({StepKind::kThought, *step.thought, it});
    if (step.conflicting_markers) {
      out.audit.push_back("iteration " + std::to_string(it) +
                          ": both markers present, first one kept");
      spdlog::debug("executor emitted both markers; first one kept");
    }
    if (step.verdict) {
      out.completed = *step.verdict == Verdict::kCompleted;
      out.termination = out.completed ? Termination::kDeclaredCompleted
                                      : Termination::kDeclaredFailed;
      break;
    }
    if (step.action) {
      out.trajectory.push_back({StepKind::kAction, *step.action, it});
      out.trajectory.push_back({StepKind::kObservation, env.step(*step.action), it});
      last_action = step.action;
    } else {
      out.trajectory.push_back({StepKind::kObservation, "Could not parse action.", it});
    }
  }

  out.salient_context = env.salient_state();
  if (last_action) out.salient_context["last_action"] = *last_action;
  return out;
}

}  // namespace adapt
