#include "medcheck/prompts.hpp"

#include <cctype>

namespace medcheck {

const std::string_view kP1Instruction =
    "The following is a medical narrative about a patient. You are a skilled "
    "medical doctor reviewing the clinical text. The text is either correct or "
    "contains one error. The text has one sentence per line. Each line starts "
    "with the sentence ID, followed by a pipe character then the sentence to "
    "check. Check every sentence of the text. If the text is correct return "
    "the following output: CORRECT. If the text has a medical error related to "
    "treatment, management, cause, or diagnosis, return the sentence id of the "
    "sentence containing the error, followed by a space, and then a corrected "
    "version of the sentence. Finding and correcting the error requires "
    "medical knowledge and reasoning.";

const std::string_view kMetaPromptVersion = "meta-v1";

std::string render_reflection_prompt(const std::string& parent_instruction,
                                     const std::string& serialized_traces) {
  std::string p;
  p += "You are improving the instruction given to a model that reviews "
       "clinical narratives for medical errors.\n\n";
  p += "Current instruction:\n";
  p += "<instruction>\n";
  p += parent_instruction;
  p += "\n</instruction>\n\n";
  p += "Below are rollouts of this instruction on training examples. Each "
       "rollout shows the model input, the model output, the reward (1 = "
       "correct, 0 = wrong) and feedback explaining the outcome.\n\n";
  p += serialized_traces;
  p += "\nWrite a revised instruction that fixes the observed failures while "
       "keeping the required output format: reply CORRECT for an error-free "
       "text, otherwise the erroneous sentence id, a space, and a corrected "
       "sentence. Return ONLY the new instruction inside a fenced code block "
       "(```).";
  return p;
}

std::string render_merge_prompt(const std::string& instruction_a,
                                std::size_t wins_a,
                                const std::string& instruction_b,
                                std::size_t wins_b, std::size_t n_instances) {
  std::string p;
  p += "You are combining two instructions for a model that reviews clinical "
       "narratives for medical errors. Each instruction is strongest on a "
       "different part of a held-out validation set.\n\n";
  p += "Instruction A (best on " + std::to_string(wins_a) + " of " +
       std::to_string(n_instances) + " validation instances):\n";
  p += "<instruction>\n" + instruction_a + "\n</instruction>\n\n";
  p += "Instruction B (best on " + std::to_string(wins_b) + " of " +
       std::to_string(n_instances) + " validation instances):\n";
  p += "<instruction>\n" + instruction_b + "\n</instruction>\n\n";
  p += "Write a single instruction that combines the strengths of both while "
       "keeping the required output format: reply CORRECT for an error-free "
       "text, otherwise the erroneous sentence id, a space, and a corrected "
       "sentence. Return ONLY the new instruction inside a fenced code block "
       "(```).";
  return p;
}

std::optional<std::string> extract_fenced_block(const std::string& text) {
  const std::string fence = "```";
  std::size_t open = text.find(fence);
  if (open == std::string::npos) return std::nullopt;
  std::size_t body = open + fence.size();
  // Skip an optional language tag on the opening fence line.
  std::size_t nl = text.find('\n', body);
  if (nl != std::string::npos) {
    bool tag_only = true;
    for (std::size_t i = body; i < nl; ++i) {
      if (std::isspace(static_cast<unsigned char>(text[i]))) continue;
      if (!std::isalnum(static_cast<unsigned char>(text[i]))) {
        tag_only = false;
        break;
      }
    }
    if (tag_only) body = nl + 1;
  }
  std::size_t close = text.find(fence, body);
  if (close == std::string::npos) return std::nullopt;
  std::string inner = text.substr(body, close - body);
  // Trim surrounding blank space; the instruction itself is kept verbatim.
  std::size_t b = inner.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return std::nullopt;
  std::size_t e = inner.find_last_not_of(" \t\r\n");
  return inner.substr(b, e - b + 1);
}

}  // namespace medcheck
