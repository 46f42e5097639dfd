#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "prmforge/types.hpp"

namespace prmforge::answers {

/**
 * Checks a predicted final answer against the gold answer.
 *
 * multiple_choice: compared after uppercasing and stripping punctuation
 * and whitespace ("B." matches "B").
 *
 * fill_in_blank: compared as normalized strings (trimmed, inner whitespace
 * collapsed, ASCII case-folded); when both sides parse as decimals or
 * a/b rationals the comparison is numeric with relative tolerance 1e-6.
 * Unparseable numerics fall back to the string comparison.
 */
bool verify_answer(std::string_view predicted, std::string_view gold, AnswerKind kind);

inline constexpr double kNumericRelTol = 1e-6;

// Accepts optional sign, decimals (including exponent notation), and
// a/b rationals. Returns nothing when the text is not purely numeric.
std::optional<long double> parse_numeric(std::string_view text);

// Uppercase, punctuation and whitespace stripped.
std::string normalize_choice(std::string_view text);

// Trimmed, inner whitespace collapsed to single spaces, ASCII lowercased.
std::string normalize_text(std::string_view text);

}  // namespace prmforge::answers
