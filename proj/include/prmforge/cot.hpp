#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prmforge/types.hpp"

namespace prmforge::cot {

/**
 * Extracts a structured solution from tagged model output.
 *
 * Every `<step>...</step>` span is taken in order; the first
 * `<answer>...</answer>` span is the final answer. Untagged text between
 * tags is ignored, and step/answer contents are whitespace-trimmed.
 * Whitespace-only step spans are dropped.
 *
 * Throws ParseError with message "malformed tags" (unclosed tag),
 * "no steps" (zero usable step spans), or "no answer" (no answer span).
 */
Solution parse_solution(std::string_view raw);

// A sampled continuation: unlike a full solution it may carry zero steps
// (the policy may finish with just an answer from a long prefix).
struct Continuation {
  std::vector<std::string> steps;
  std::string answer;
};

// Same tag scanning as parse_solution but tolerates zero steps.
// Throws ParseError "malformed tags" / "no answer".
Continuation parse_continuation(std::string_view raw);

// Canonical renderer; parse_solution(render_solution(s)) == s for solutions
// whose texts contain no tag literals.
std::string render_solution(const Solution& solution);

// Renders prior steps only, for use as an assistant-message prefix.
std::string render_prefix(std::span<const std::string> steps);

}  // namespace prmforge::cot
