#include "medcheck/backend.hpp"

#include <algorithm>

namespace medcheck {

std::string_view role_name(Role r) {
  switch (r) {
    case Role::system:
      return "system";
    case Role::user:
      return "user";
    case Role::assistant:
      return "assistant";
  }
  return "user";
}

ScriptedBackend::ScriptedBackend(std::vector<std::string> queued_replies) {
  for (auto& r : queued_replies) queue_.push_back(std::move(r));
}

void ScriptedBackend::push_reply(std::string text) {
  std::lock_guard lock(mu_);
  queue_.push_back(std::move(text));
}

void ScriptedBackend::add_rule(Rule rule) {
  std::lock_guard lock(mu_);
  rules_.push_back(std::move(rule));
}

Completion ScriptedBackend::complete(const ChatRequest& req) {
  if (req.messages.empty()) {
    throw InvariantViolation("chat request has no messages");
  }
  std::lock_guard lock(mu_);
  ++calls_;
  for (const auto& rule : rules_) {
    if (auto c = rule(req)) return *c;
  }
  if (queue_.empty()) {
    throw ScriptExhausted("scripted backend has no reply left (call " +
                          std::to_string(calls_) + ")");
  }
  Completion c;
  c.text = std::move(queue_.front());
  queue_.pop_front();
  c.finish_reason = FinishReason::stop;
  return c;
}

std::size_t ScriptedBackend::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

ScriptedBackend::Rule substring_rule(std::string needle, std::string reply) {
  return [needle = std::move(needle),
          reply = std::move(reply)](const ChatRequest& req) -> std::optional<Completion> {
    for (const auto& m : req.messages) {
      if (m.content.find(needle) != std::string::npos) {
        return Completion{reply, FinishReason::stop, std::nullopt};
      }
    }
    return std::nullopt;
  };
}

namespace {

std::string concat_role(const ChatRequest& req, Role role) {
  std::string out;
  for (const auto& m : req.messages) {
    if (m.role == role) {
      if (!out.empty()) out += '\n';
      out += m.content;
    }
  }
  return out;
}

// Pulls every block wrapped in <instruction> ... </instruction>.
std::vector<std::string> instruction_blocks(const std::string& text) {
  std::vector<std::string> blocks;
  const std::string open = "<instruction>\n";
  const std::string close = "\n</instruction>";
  std::size_t pos = 0;
  while (true) {
    std::size_t b = text.find(open, pos);
    if (b == std::string::npos) break;
    b += open.size();
    std::size_t e = text.find(close, b);
    if (e == std::string::npos) break;
    blocks.push_back(text.substr(b, e - b));
    pos = e + close.size();
  }
  return blocks;
}

std::string fenced(const std::string& body) {
  return "```\n" + body + "\n```";
}

}  // namespace

ScriptedBackend::Rule sentinel_detector_rule(std::string token,
                                             std::string sentinel) {
  return [token = std::move(token), sentinel = std::move(sentinel)](
             const ChatRequest& req) -> std::optional<Completion> {
    const std::string sys = concat_role(req, Role::system);
    const std::string user = concat_role(req, Role::user);
    if (sys.find(token) == std::string::npos) {
      return Completion{"CORRECT", FinishReason::stop, std::nullopt};
    }
    // Token present: behave like a competent reviewer of "id|text" lines.
    std::size_t start = 0;
    while (start <= user.size()) {
      std::size_t nl = user.find('\n', start);
      std::string line = user.substr(
          start, nl == std::string::npos ? std::string::npos : nl - start);
      std::size_t pipe = line.find('|');
      if (pipe != std::string::npos &&
          line.find(sentinel, pipe) != std::string::npos) {
        std::string id = line.substr(0, pipe);
        std::string text = line.substr(pipe + 1);
        std::size_t at = text.find(sentinel);
        text.erase(at, sentinel.size());
        while (!text.empty() && (text.back() == ' ' || text.back() == '\t'))
          text.pop_back();
        while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
          text.erase(text.begin());
        if (text.empty()) text = "corrected.";
        return Completion{id + " " + text, FinishReason::stop, std::nullopt};
      }
      if (nl == std::string::npos) break;
      start = nl + 1;
    }
    return Completion{"CORRECT", FinishReason::stop, std::nullopt};
  };
}

ScriptedBackend::Rule token_inserter_rule(std::string token) {
  return [token = std::move(token)](
             const ChatRequest& req) -> std::optional<Completion> {
    const std::string user = concat_role(req, Role::user);
    auto blocks = instruction_blocks(user);
    if (blocks.empty()) return std::nullopt;
    if (blocks.size() >= 2) {
      // Merge prompt: concatenate the two instructions.
      return Completion{fenced(blocks[0] + "\n" + blocks[1]),
                        FinishReason::stop, std::nullopt};
    }
    std::string child = blocks[0];
    const bool saw_failure = user.find("reward: 0") != std::string::npos;
    if (saw_failure && child.find(token) == std::string::npos) {
      child += " " + token;
    }
    return Completion{fenced(child), FinishReason::stop, std::nullopt};
  };
}

}  // namespace medcheck
