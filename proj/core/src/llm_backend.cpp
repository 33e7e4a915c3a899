#include "adapt/llm_backend.hpp"

#include <stdexcept>

#include "adapt/errors.hpp"
#include "adapt/scripted_policy.hpp"
#include "http_backend.hpp"

namespace adapt {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::kSystem: return "system";
    case Role::kUser: return "user";
    case Role::kAssistant: return "assistant";
  }
  return "user";
}

std::string_view to_string(Module m) {
  return m == Module::kExecutor ? "executor" : "planner";
}

std::string_view to_string(StepKind kind) {
  switch (kind) {
    case StepKind::kThought: return "thought";
    case StepKind::kAction: return "action";
    case StepKind::kObservation: return "observation";
  }
  return "thought";
}

std::string_view to_string(BackendKind k) {
  switch (k) {
    case BackendKind::kHttpChat: return "http_chat";
    case BackendKind::kHttpCompletion: return "http_completion";
    case BackendKind::kScripted: return "scripted";
  }
  return "scripted";
}

BackendKind backend_kind_from_string(std::string_view s) {
  if (s == "http_chat") return BackendKind::kHttpChat;
  if (s == "http_completion") return BackendKind::kHttpCompletion;
  if (s == "scripted") return BackendKind::kScripted;
  throw ConfigError("unknown backend kind '" + std::string(s) + "'");
}

void GenRequest::validate() const {
  if (messages.empty()) throw std::invalid_argument("request has no messages");
  if (temperature < 0.0 || temperature > 2.0) {
    throw std::invalid_argument("temperature must lie in [0, 2]");
  }
  if (max_tokens < 1) throw std::invalid_argument("max_tokens must be positive");
}

void BackendConfig::validate() const {
  const bool http = kind != BackendKind::kScripted;
  if (http && endpoint_url.empty()) {
    throw ConfigError("backend '" + model_name + "' needs an endpoint url");
  }
  if (!http && !endpoint_url.empty()) {
    throw ConfigError("scripted backends take no endpoint url");
  }
  if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (default_temperature < 0.0 || default_temperature > 2.0) {
    throw ConfigError("temperature must lie in [0, 2]");
  }
  if (scripted.competence < 0) throw ConfigError("competence must be >= 0");
  if (scripted.misdeclare_rate < 0.0 || scripted.misdeclare_rate > 1.0) {
    throw ConfigError("misdeclare_rate must lie in [0, 1]");
  }
}

GenResponse generate(LlmBackend& backend, const GenRequest& req, CallLedger& ledger,
                     CallTag tag) {
  if (ledger.exhausted()) {
    throw BudgetExhausted("episode call ceiling of " + std::to_string(*ledger.ceiling()) +
                          " reached");
  }
  size_t request_chars = 0;
  for (const auto& m : req.messages) request_chars += m.text.size();

  CallRecord rec;
  rec.module = tag.module;
  rec.depth = tag.depth;
  rec.request_chars = request_chars;
  try {
    GenResponse resp = backend.complete(req);
    rec.response_chars = resp.text.size();
    rec.transport_attempts = resp.transport_attempts;
    ledger.record(rec);
    return resp;
  } catch (...) {
    rec.failed = true;
    rec.transport_attempts = backend.last_transport_attempts();
    ledger.record(rec);
    throw;
  }
}

std::unique_ptr<LlmBackend> make_backend(const BackendConfig& cfg,
                                         std::shared_ptr<const textcraft::RecipeBook> book,
                                         uint64_t episode_ordinal) {
  cfg.validate();
  if (cfg.kind == BackendKind::kScripted) {
    return std::make_unique<ScriptedBackend>(cfg, std::move(book), episode_ordinal);
  }
  return std::make_unique<HttpBackend>(cfg);
}

}  // namespace adapt
