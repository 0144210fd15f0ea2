#pragma once

#include <chrono>
#include <cstddef>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "medcheck/errors.hpp"

namespace medcheck {

enum class Role { system, user, assistant };

std::string_view role_name(Role r);

struct Message {
  Role role = Role::user;
  std::string content;

  bool operator==(const Message&) const = default;
};

struct ChatRequest {
  std::string model_name;
  std::vector<Message> messages;  // non-empty
  int max_tokens = 32768;         // completion cap applied uniformly to every model
  std::optional<double> temperature;
  std::optional<long> seed;
  // Forwarded verbatim onto the wire, never interpreted (e.g. vendor-specific
  // reasoning toggles).
  nlohmann::json extra = nlohmann::json::object();
};

enum class FinishReason { stop, length, other };

struct TokenUsage {
  long prompt_tokens = 0;
  long completion_tokens = 0;
  long total_tokens = 0;

  bool operator==(const TokenUsage&) const = default;
};

struct Completion {
  std::string text;
  FinishReason finish_reason = FinishReason::stop;
  std::optional<TokenUsage> usage;
};

struct RetryPolicy {
  int max_attempts = 3;  // >= 1
  // Wait before retry k is backoff[min(k, size-1)]; empty means no wait.
  std::vector<std::chrono::milliseconds> backoff = {
      std::chrono::milliseconds(500), std::chrono::milliseconds(2000),
      std::chrono::milliseconds(8000)};
};

struct BackendConfig {
  std::string base_url;  // e.g. "https://api.openai.com/v1"
  std::string model_name;
  std::string api_key_env_var;  // secrets come from the environment only
  std::chrono::milliseconds timeout = std::chrono::milliseconds(120000);
  RetryPolicy retry;
  int max_in_flight = 4;
};

// Uniform "send a chat request, get a completion" contract. Implementations
// must tolerate concurrent complete() calls from up to max_in_flight()
// threads.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual Completion complete(const ChatRequest& req) = 0;
  virtual int max_in_flight() const { return 1; }
};

// Deterministic scripted backend for tests and synthetic experiments.
// Rules are consulted in registration order; the first one returning a
// completion wins. When no rule matches, replies are popped from a FIFO
// queue. Identical request sequences yield identical completion sequences.
class ScriptedBackend : public Backend {
 public:
  using Rule = std::function<std::optional<Completion>(const ChatRequest&)>;

  ScriptedBackend() = default;
  explicit ScriptedBackend(std::vector<std::string> queued_replies);

  void push_reply(std::string text);
  void add_rule(Rule rule);
  void set_max_in_flight(int n) { in_flight_ = n; }

  Completion complete(const ChatRequest& req) override;
  int max_in_flight() const override { return in_flight_; }

  std::size_t calls() const;

 private:
  mutable std::mutex mu_;  // serializes queue access under concurrency
  std::deque<std::string> queue_;
  std::vector<Rule> rules_;
  std::size_t calls_ = 0;
  int in_flight_ = 1;
};

// Canned rule helpers, also reachable from declarative run configs.
ScriptedBackend::Rule substring_rule(std::string needle, std::string reply);

// Detection mock: when the system message contains `token`, flags the first
// user line whose text contains `sentinel` (replying "<id> <text minus
// sentinel>"), else replies CORRECT. Without the token it always replies
// CORRECT.
ScriptedBackend::Rule sentinel_detector_rule(std::string token,
                                             std::string sentinel);

// Reflector mock: extracts the instruction under revision from the
// meta-prompt and, if any serialized trace failed, re-emits it with `token`
// appended; otherwise re-emits it unchanged. Merge prompts get the two
// instructions concatenated.
ScriptedBackend::Rule token_inserter_rule(std::string token);

}  // namespace medcheck
