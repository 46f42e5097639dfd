#include "prmforge/types.hpp"

#include "prmforge/error.hpp"

namespace prmforge {

std::string to_string(AnswerKind kind) {
  switch (kind) {
    case AnswerKind::MultipleChoice:
      return "multiple_choice";
    case AnswerKind::FillInBlank:
      return "fill_in_blank";
  }
  throw ValidationError("unknown answer kind");
}

AnswerKind answer_kind_from_string(const std::string& s) {
  if (s == "multiple_choice") return AnswerKind::MultipleChoice;
  if (s == "fill_in_blank") return AnswerKind::FillInBlank;
  throw ValidationError("unknown answer kind: '" + s + "'");
}

void validate(const ImageRef& image) {
  const bool has_uri = !image.uri.empty();
  const bool has_b64 = !image.b64.empty();
  if (has_uri == has_b64)
    throw ValidationError("image must carry exactly one of uri / b64");
  if (has_b64 && image.media_type.empty())
    throw ValidationError("base64 image must carry a media_type");
}

void validate(const Problem& problem) {
  if (problem.id.empty()) throw ValidationError("problem id must be non-empty");
  if (problem.gold_answer.empty())
    throw ValidationError("problem '" + problem.id + "': gold_answer must be non-empty");
  for (const auto& img : problem.images) {
    try {
      validate(img);
    } catch (const ValidationError& e) {
      throw ValidationError("problem '" + problem.id + "': " + e.what());
    }
  }
}

void validate(const Solution& solution) {
  if (solution.steps.empty()) throw ValidationError("solution must have at least one step");
  for (const auto& s : solution.steps)
    if (s.empty()) throw ValidationError("solution steps must be non-empty");
  if (solution.final_answer.empty())
    throw ValidationError("solution final_answer must be non-empty");
}

void validate(const SamplingParams& params) {
  if (params.temperature < 0) throw ValidationError("temperature must be nonnegative");
  if (params.top_k < 1) throw ValidationError("top_k must be positive");
  if (!(params.top_p > 0.0 && params.top_p <= 1.0))
    throw ValidationError("top_p must be in (0, 1]");
  if (params.max_tokens < 1) throw ValidationError("max_tokens must be positive");
}

}  // namespace prmforge
