#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace prmforge {

enum class AnswerKind { MultipleChoice, FillInBlank };

std::string to_string(AnswerKind kind);
AnswerKind answer_kind_from_string(const std::string& s);

// Opaque attachment forwarded to the backend verbatim; never decoded locally.
// Exactly one of uri / b64 is set; media_type accompanies b64.
struct ImageRef {
  std::string uri;
  std::string b64;
  std::string media_type;

  bool operator==(const ImageRef&) const = default;
};

// One seed question.
struct Problem {
  std::string id;
  std::string question;
  std::vector<ImageRef> images;
  std::string gold_answer;
  AnswerKind kind = AnswerKind::FillInBlank;

  bool operator==(const Problem&) const = default;
};

// Throws ValidationError unless exactly one of uri / b64 is set, with a
// media_type whenever b64 is.
void validate(const ImageRef& image);

// Throws ValidationError on empty id or gold answer.
void validate(const Problem& problem);

// An ordered list of reasoning steps plus a final answer.
struct Solution {
  std::vector<std::string> steps;  // at least one non-empty step
  std::string final_answer;        // non-empty

  bool operator==(const Solution&) const = default;
};

void validate(const Solution& solution);

struct SamplingParams {
  double temperature = 1.0;
  int top_k = 50;
  double top_p = 0.9;
  int max_tokens = 2048;
  std::optional<std::int64_t> seed;
};

void validate(const SamplingParams& params);

}  // namespace prmforge
