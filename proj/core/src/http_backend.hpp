#pragma once

#include "adapt/llm_backend.hpp"

namespace adapt {

/// Chat-completions style JSON over HTTP(S) with jittered exponential
/// backoff on 429, 5xx and transport failures.
class HttpBackend : public LlmBackend {
 public:
  explicit HttpBackend(BackendConfig cfg);

  GenResponse complete(const GenRequest& req) override;
  const BackendConfig& config() const override { return cfg_; }
  int last_transport_attempts() const override { return last_attempts_; }

 private:
  BackendConfig cfg_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;
  int last_attempts_ = 0;
};

}  // namespace adapt
