#include "medcheck/http_backend.hpp"

#include <cstdio>
#include <cstdlib>
#include <thread>

#include "httplib.h"

namespace medcheck {

namespace {

// Splits "http(s)://host[:port][/prefix]" into the origin httplib wants and
// the path prefix to prepend to endpoints.
std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
  std::size_t scheme = base_url.find("://");
  if (scheme == std::string::npos) {
    throw ConfigError("base_url must include a scheme: " + base_url);
  }
  std::size_t path = base_url.find('/', scheme + 3);
  if (path == std::string::npos) {
    return {base_url, ""};
  }
  std::string prefix = base_url.substr(path);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {base_url.substr(0, path), prefix};
}

FinishReason parse_finish_reason(const nlohmann::json& choice) {
  if (!choice.contains("finish_reason") || choice["finish_reason"].is_null()) {
    return FinishReason::other;
  }
  const std::string r = choice["finish_reason"].get<std::string>();
  if (r == "stop") return FinishReason::stop;
  if (r == "length") return FinishReason::length;
  return FinishReason::other;
}

Completion parse_completion(const nlohmann::json& body) {
  if (!body.contains("choices") || !body["choices"].is_array() ||
      body["choices"].empty()) {
    throw TransportError("response has no choices: " + body.dump());
  }
  const auto& choice = body["choices"][0];
  if (!choice.contains("message") || !choice["message"].contains("content")) {
    throw TransportError("response choice has no message content");
  }
  Completion c;
  c.text = choice["message"]["content"].is_null()
               ? std::string{}
               : choice["message"]["content"].get<std::string>();
  c.finish_reason = parse_finish_reason(choice);
  if (body.contains("usage") && body["usage"].is_object()) {
    TokenUsage u;
    const auto& usage = body["usage"];
    u.prompt_tokens = usage.value("prompt_tokens", 0L);
    u.completion_tokens = usage.value("completion_tokens", 0L);
    u.total_tokens = usage.value("total_tokens", 0L);
    c.usage = u;
  }
  return c;
}

}  // namespace

HttpBackend::HttpBackend(BackendConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.retry.max_attempts < 1) {
    throw ConfigError("retry.max_attempts must be >= 1");
  }
}

nlohmann::json HttpBackend::to_wire(const ChatRequest& req,
                                    const std::string& default_model) {
  if (req.messages.empty()) {
    throw InvariantViolation("chat request has no messages");
  }
  if (req.max_tokens < 1) {
    throw InvariantViolation("max_tokens must be >= 1");
  }
  nlohmann::json body;
  body["model"] = req.model_name.empty() ? default_model : req.model_name;
  body["messages"] = nlohmann::json::array();
  for (const auto& m : req.messages) {
    body["messages"].push_back(
        {{"role", std::string(role_name(m.role))}, {"content", m.content}});
  }
  body["max_tokens"] = req.max_tokens;
  if (req.temperature.has_value()) body["temperature"] = *req.temperature;
  if (req.seed.has_value()) body["seed"] = *req.seed;
  for (auto it = req.extra.begin(); it != req.extra.end(); ++it) {
    if (!body.contains(it.key())) body[it.key()] = it.value();
  }
  return body;
}

Completion HttpBackend::complete(const ChatRequest& req) {
  const auto [origin, prefix] = split_base_url(cfg_.base_url);
  const std::string endpoint = prefix + "/chat/completions";
  const nlohmann::json body = to_wire(req, cfg_.model_name);
  const std::string payload = body.dump();

  std::string api_key;
  if (!cfg_.api_key_env_var.empty()) {
    const char* v = std::getenv(cfg_.api_key_env_var.c_str());
    if (v == nullptr || *v == '\0') {
      throw AuthError("environment variable " + cfg_.api_key_env_var +
                      " is not set");
    }
    api_key = v;
  }

  std::string last_error;
  bool last_was_rate_limit = false;
  for (int attempt = 1; attempt <= cfg_.retry.max_attempts; ++attempt) {
    if (attempt > 1 && !cfg_.retry.backoff.empty()) {
      const std::size_t idx =
          std::min<std::size_t>(attempt - 2, cfg_.retry.backoff.size() - 1);
      std::this_thread::sleep_for(cfg_.retry.backoff[idx]);
    }

    httplib::Client cli(origin);
    cli.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(
        cfg_.timeout));
    cli.set_read_timeout(
        std::chrono::duration_cast<std::chrono::seconds>(cfg_.timeout));
    cli.set_write_timeout(
        std::chrono::duration_cast<std::chrono::seconds>(cfg_.timeout));
    httplib::Headers headers;
    if (!api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + api_key);
    }

    auto res = cli.Post(endpoint, headers, payload, "application/json");
    if (!res) {
      last_error = "transport failure: " + httplib::to_string(res.error());
      last_was_rate_limit = false;
      continue;
    }
    if (res->status == 200) {
      nlohmann::json parsed;
      try {
        parsed = nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::exception& e) {
        throw TransportError(std::string("unparseable response body: ") +
                             e.what());
      }
      Completion c = parse_completion(parsed);
      if (c.finish_reason == FinishReason::length) {
        std::fprintf(stderr,
                     "[medcheck] warning: completion hit the max_tokens cap "
                     "(%d); text may be truncated\n",
                     req.max_tokens);
      }
      return c;
    }
    if (res->status == 401 || res->status == 403) {
      throw AuthError("endpoint rejected credentials (status " +
                      std::to_string(res->status) + ")");
    }
    if (res->status == 429) {
      last_error = "rate limited (status 429)";
      last_was_rate_limit = true;
      continue;
    }
    if (res->status >= 500) {
      last_error = "server error (status " + std::to_string(res->status) + ")";
      last_was_rate_limit = false;
      continue;
    }
    throw TransportError("endpoint returned status " +
                         std::to_string(res->status) + ": " + res->body);
  }
  if (last_was_rate_limit) {
    throw RateLimited(last_error + " after " +
                      std::to_string(cfg_.retry.max_attempts) + " attempts");
  }
  throw TransportError(last_error + " after " +
                       std::to_string(cfg_.retry.max_attempts) + " attempts");
}

}  // namespace medcheck
