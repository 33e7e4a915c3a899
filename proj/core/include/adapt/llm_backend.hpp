#pragma once

// Uniform text generation over remote chat/completion endpoints and the
// offline scripted policies, with per-episode call accounting.

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "adapt/environment.hpp"
#include "adapt/trajectory.hpp"

namespace adapt {

namespace textcraft {
class RecipeBook;
}

enum class Role { kSystem, kUser, kAssistant };
std::string_view to_string(Role role);

struct ChatMessage {
  Role role = Role::kUser;
  std::string text;
};

enum class Module { kExecutor, kPlanner };
std::string_view to_string(Module m);

enum class PlanDetail { kAbstract, kDetailed };

/// Structured view of the request for offline policies. HTTP backends
/// ignore it; the prompt text carries the same information.
struct ScriptHint {
  Module module = Module::kExecutor;
  std::string task;
  Trajectory transcript;
  StringMap context;
  PlanDetail detail = PlanDetail::kAbstract;
};

struct GenRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 256;
  std::vector<std::string> stop_sequences;
  std::optional<ScriptHint> hint;

  /// Throws std::invalid_argument on empty messages or temperature
  /// outside [0, 2].
  void validate() const;
};

struct TokenCounts {
  int prompt = 0;
  int completion = 0;
};

struct GenResponse {
  std::string text;
  std::optional<TokenCounts> tokens;
  std::chrono::milliseconds latency{0};
  int transport_attempts = 1;
};

enum class BackendKind { kHttpChat, kHttpCompletion, kScripted };
std::string_view to_string(BackendKind k);
BackendKind backend_kind_from_string(std::string_view s);

struct ScriptedPolicyConfig {
  /// Most craft actions the scripted executor completes in one sub-task.
  int competence = 1;
  std::string planner_style = "recipe_decomposer";
  uint64_t rng_seed = 0;
  /// Fraction of episodes whose failed verdicts are reported as success.
  double misdeclare_rate = 0.0;
};

struct BackendConfig {
  BackendKind kind = BackendKind::kScripted;
  std::string model_name = "scripted";
  std::string endpoint_url;
  double default_temperature = 0.0;
  std::chrono::milliseconds request_timeout{60'000};
  int max_retries = 3;
  std::chrono::milliseconds retry_base_delay{1'000};
  std::string api_key_env;
  int max_tokens = 256;
  std::vector<std::string> stop_sequences;
  ScriptedPolicyConfig scripted;

  /// Throws ConfigError.
  void validate() const;
};

struct CallRecord {
  int64_t call_id = 0;
  Module module = Module::kExecutor;
  int depth = 0;
  size_t request_chars = 0;
  size_t response_chars = 0;
  int transport_attempts = 1;
  bool failed = false;
};

struct CallTag {
  Module module = Module::kExecutor;
  int depth = 1;
};

/// Per-episode call counters. Single writer.
class CallLedger {
 public:
  CallLedger() = default;
  explicit CallLedger(std::optional<int> ceiling) : ceiling_(ceiling) {}

  void set_ceiling(std::optional<int> ceiling) { ceiling_ = ceiling; }
  std::optional<int> ceiling() const { return ceiling_; }
  bool exhausted() const { return ceiling_ && total_calls() >= *ceiling_; }

  int64_t record(CallRecord rec);

  int executor_calls() const { return executor_calls_; }
  int planner_calls() const { return planner_calls_; }
  int total_calls() const { return executor_calls_ + planner_calls_; }
  int transport_attempts() const;
  const std::vector<CallRecord>& records() const { return records_; }

 private:
  std::optional<int> ceiling_;
  int executor_calls_ = 0;
  int planner_calls_ = 0;
  std::vector<CallRecord> records_;
};

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual GenResponse complete(const GenRequest& req) = 0;
  virtual const BackendConfig& config() const = 0;
  /// Transport attempts spent by the most recent complete() call.
  virtual int last_transport_attempts() const { return 1; }
};

/// One logical call: checks the ceiling (BudgetExhausted), forwards to the
/// backend and records exactly one ledger entry, failed calls included.
GenResponse generate(LlmBackend& backend, const GenRequest& req,
                     CallLedger& ledger, CallTag tag);

/// `episode_ordinal` seeds per-episode scripted behavior (misdeclaration).
std::unique_ptr<LlmBackend> make_backend(
    const BackendConfig& cfg,
    std::shared_ptr<const textcraft::RecipeBook> book = nullptr,
    uint64_t episode_ordinal = 0);

}  // namespace adapt
