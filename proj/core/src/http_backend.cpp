#include "http_backend.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <json.hpp>
#include <random>
#include <thread>

#include "adapt/errors.hpp"

namespace adapt {

using nlohmann::json;

namespace {

std::string flatten(const std::vector<ChatMessage>& messages) {
  std::string out;
  for (const auto& m : messages) {
    if (!out.empty()) out += "\n\n";
    out += m.text;
  }
  return out;
}

std::optional<std::chrono::milliseconds> retry_after(const httplib::Response& res) {
  if (!res.has_header("Retry-After")) return std::nullopt;
  try {
    double secs = std::stod(res.get_header_value("Retry-After"));
    if (secs < 0) return std::nullopt;
    return std::chrono::milliseconds(static_cast<int64_t>(secs * 1000.0));
  } catch (const std::exception&) {
    return std::nullopt;  // HTTP-date form is not supported
  }
}

std::chrono::milliseconds backoff(std::chrono::milliseconds base, int attempt) {
  thread_local std::mt19937 rng{std::random_device{}()};
  std::uniform_real_distribution<double> jitter(0.5, 1.5);
  double ms = static_cast<double>(base.count()) * std::pow(2.0, attempt) * jitter(rng);
  return std::chrono::milliseconds(static_cast<int64_t>(std::min(ms, 60'000.0)));
}

GenResponse parse_body(const std::string& body, BackendKind kind) {
  GenResponse out;
  try {
    json j = json::parse(body);
    const json& choice = j.at("choices").at(0);
    if (kind == BackendKind::kHttpChat) {
      const json& content = choice.at("message").at("content");
      out.text = content.is_null() ? "" : content.get<std::string>();
    } else {
      out.text = choice.at("text").get<std::string>();
    }
    if (j.contains("usage") && j["usage"].is_object()) {
      out.tokens = TokenCounts{j["usage"].value("prompt_tokens", 0),
                               j["usage"].value("completion_tokens", 0)};
    }
  } catch (const json::exception& e) {
    throw MalformedServerResponse(std::string("unexpected response body: ") + e.what());
  }
  return out;
}

}  // namespace

HttpBackend::HttpBackend(BackendConfig cfg) : cfg_(std::move(cfg)) {
  const std::string& url = cfg_.endpoint_url;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint url needs a scheme: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
}

GenResponse HttpBackend::complete(const GenRequest& req) {
  req.validate();

  json body{{"model", cfg_.model_name},
            {"temperature", req.temperature},
            {"max_tokens", req.max_tokens}};
  if (cfg_.kind == BackendKind::kHttpChat) {
    json messages = json::array();
    for (const auto& m : req.messages) {
      messages.push_back({{"role", std::string(to_string(m.role))}, {"content", m.text}});
    }
    body["messages"] = std::move(messages);
  } else {
    body["prompt"] = flatten(req.messages);
  }
  if (!req.stop_sequences.empty()) body["stop"] = req.stop_sequences;
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!cfg_.api_key_env.empty()) {
    if (const char* key = std::getenv(cfg_.api_key_env.c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  httplib::Client client(origin_);
  auto timeout = cfg_.request_timeout;
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(),
                                static_cast<time_t>((timeout.count() % 1000) * 1000));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(),
                          static_cast<time_t>((timeout.count() % 1000) * 1000));

  auto started = std::chrono::steady_clock::now();
  std::exception_ptr last;
  last_attempts_ = 0;
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    ++last_attempts_;
    std::optional<std::chrono::milliseconds> wait;
    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last = std::make_exception_ptr(
          TransportError("request to " + cfg_.endpoint_url + " failed: " +
                         httplib::to_string(res.error())));
    } else if (res->status == 429) {
      wait = retry_after(*res);
      last = std::make_exception_ptr(RateLimited("rate limited by " + cfg_.endpoint_url, wait));
    } else if (res->status >= 500) {
      last = std::make_exception_ptr(
          TransportError("server error " + std::to_string(res->status)));
    } else if (res->status >= 400) {
      throw TransportError("request rejected with status " + std::to_string(res->status) +
                           ": " + res->body);
    } else {
      GenResponse out = parse_body(res->body, cfg_.kind);
      out.transport_attempts = last_attempts_;
      out.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - started);
      return out;
    }
    if (attempt < cfg_.max_retries) {
      std::this_thread::sleep_for(wait.value_or(backoff(cfg_.retry_base_delay, attempt)));
    }
  }
  std::rethrow_exception(last);
}

}  // namespace adapt
