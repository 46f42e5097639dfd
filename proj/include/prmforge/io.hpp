#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "prmforge/types.hpp"

namespace prmforge::io {

// JSON shape for one image reference: {"uri": "..."} or
// {"b64": "...", "media_type": "..."}. Exactly one of the two forms.
nlohmann::json image_to_json(const ImageRef& image);
nlohmann::json images_to_json(const std::vector<ImageRef>& images);
ImageRef image_from_json(const nlohmann::json& j);

nlohmann::json problem_to_json(const Problem& problem);
Problem problem_from_json(const nlohmann::json& j);

// Reads one problem per line. Throws ParseError with the 1-based line number
// on bad JSON or a schema violation, and on duplicate problem ids.
std::vector<Problem> load_problems_jsonl(std::istream& source);
std::vector<Problem> load_problems_file(const std::string& path);

// Candidate solutions for reranking: one JSON object per line of the form
// {"problem_id": "...", "candidates": ["<step>...</step><answer>...</answer>", ...]}.
// Raw candidate texts are kept verbatim; parsing happens at rerank time so a
// malformed candidate can be scored as wrong instead of aborting the run.
struct CandidateSet {
  std::string problem_id;
  std::vector<std::string> candidates;
};

std::vector<CandidateSet> load_candidates_jsonl(std::istream& source);
std::vector<CandidateSet> load_candidates_file(const std::string& path);

}  // namespace prmforge::io
