#pragma once

#include "medcheck/backend.hpp"

namespace medcheck {

// Live client for endpoints speaking the common chat-completions wire format:
// POST {base_url}/chat/completions with a bearer token read from the
// environment variable named in the config. Transient failures (transport
// errors, 429, 5xx) are retried per the config's RetryPolicy.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(BackendConfig cfg);

  Completion complete(const ChatRequest& req) override;
  int max_in_flight() const override { return cfg_.max_in_flight; }

  const BackendConfig& config() const { return cfg_; }

  // Request body exactly as serialized onto the wire; exposed so tests can
  // pin the format.
  static nlohmann::json to_wire(const ChatRequest& req,
                                const std::string& default_model);

 private:
  BackendConfig cfg_;
};

}  // namespace medcheck
