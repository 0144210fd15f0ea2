#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace medcheck {

// The MEDEC benchmark's zero-shot detection instruction, bundled verbatim.
// This is the default seed candidate for optimization and the baseline
// instruction for evaluation runs.
extern const std::string_view kP1Instruction;

// Version tag for the two meta-prompt templates below. Bump it whenever the
// template wording changes so run records stay comparable.
extern const std::string_view kMetaPromptVersion;

// Meta-prompt asking the reflector to revise an instruction given serialized
// rollouts (input, output, reward, feedback) from the feedback split.
std::string render_reflection_prompt(const std::string& parent_instruction,
                                     const std::string& serialized_traces);

// Meta-prompt asking the reflector to combine two frontier instructions.
// Only win-set sizes are disclosed, never validation content.
std::string render_merge_prompt(const std::string& instruction_a,
                                std::size_t wins_a,
                                const std::string& instruction_b,
                                std::size_t wins_b, std::size_t n_instances);

// Returns the contents of the first ``` fenced block in a reply, or nullopt
// when no complete block is present.
std::optional<std::string> extract_fenced_block(const std::string& text);

}  // namespace medcheck
