#include "prmforge/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "prmforge/error.hpp"

namespace prmforge::io {

using nlohmann::json;

json image_to_json(const ImageRef& image) {
  validate(image);
  json j;
  if (!image.uri.empty()) {
    j["uri"] = image.uri;
  } else {
    j["b64"] = image.b64;
    j["media_type"] = image.media_type;
  }
  return j;
}

json images_to_json(const std::vector<ImageRef>& images) {
  json arr = json::array();
  for (const auto& image : images) arr.push_back(image_to_json(image));
  return arr;
}

ImageRef image_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("image must be a JSON object");
  ImageRef image;
  if (j.contains("uri")) image.uri = j.at("uri").get<std::string>();
  if (j.contains("b64")) image.b64 = j.at("b64").get<std::string>();
  if (j.contains("media_type")) image.media_type = j.at("media_type").get<std::string>();
  validate(image);
  return image;
}

json problem_to_json(const Problem& problem) {
  validate(problem);
  json j;
  j["id"] = problem.id;
  j["question"] = problem.question;
  j["images"] = images_to_json(problem.images);
  j["gold_answer"] = problem.gold_answer;
  j["kind"] = to_string(problem.kind);
  return j;
}

Problem problem_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("problem must be a JSON object");
  Problem problem;
  try {
    problem.id = j.at("id").get<std::string>();
    problem.question = j.at("question").get<std::string>();
    if (j.contains("images")) {
      const auto& images = j.at("images");
      if (!images.is_array()) throw ParseError("images must be an array");
      for (const auto& entry : images) problem.images.push_back(image_from_json(entry));
    }
    problem.gold_answer = j.at("gold_answer").get<std::string>();
    problem.kind = answer_kind_from_string(j.at("kind").get<std::string>());
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
  validate(problem);
  return problem;
}

namespace {

// Shared line-by-line JSONL walk; rethrows per-record failures with the
// 1-based line number attached.
template <typename Fn>
void for_each_jsonl(std::istream& source, Fn&& fn) {
  std::string line;
  int line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (record.is_discarded())
      throw ParseError("line " + std::to_string(line_no) + ": invalid JSON");
    try {
      fn(record);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const json::exception& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

}  // namespace

std::vector<Problem> load_problems_jsonl(std::istream& source) {
  std::vector<Problem> problems;
  std::set<std::string> seen;
  for_each_jsonl(source, [&](const json& record) {
    Problem problem = problem_from_json(record);
    if (!seen.insert(problem.id).second)
      throw ParseError("duplicate problem id: '" + problem.id + "'");
    problems.push_back(std::move(problem));
  });
  return problems;
}

std::vector<Problem> load_problems_file(const std::string& path) {
  auto in = open_or_throw(path);
  return load_problems_jsonl(in);
}

std::vector<CandidateSet> load_candidates_jsonl(std::istream& source) {
  std::vector<CandidateSet> sets;
  std::set<std::string> seen;
  for_each_jsonl(source, [&](const json& record) {
    if (!record.is_object()) throw ParseError("candidate record must be a JSON object");
    CandidateSet set;
    set.problem_id = record.at("problem_id").get<std::string>();
    if (set.problem_id.empty()) throw ParseError("problem_id must be non-empty");
    const auto& candidates = record.at("candidates");
    if (!candidates.is_array() || candidates.empty())
      throw ParseError("candidates must be a non-empty array");
    for (const auto& entry : candidates) set.candidates.push_back(entry.get<std::string>());
    if (!seen.insert(set.problem_id).second)
      throw ParseError("duplicate problem id: '" + set.problem_id + "'");
    sets.push_back(std::move(set));
  });
  return sets;
}

std::vector<CandidateSet> load_candidates_file(const std::string& path) {
  auto in = open_or_throw(path);
  return load_candidates_jsonl(in);
}

}  // namespace prmforge::io
