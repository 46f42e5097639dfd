#include "prmforge/mock_backend.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "prmforge/cot.hpp"
#include "prmforge/error.hpp"
#include "prmforge/rng.hpp"

namespace prmforge {
namespace {

using nlohmann::json;

MockProblemScript script_from_json(const json& j) {
  MockProblemScript s;
  if (j.contains("table")) {
    for (const auto& [key, value] : j.at("table").items()) {
      std::vector<std::string> cycle = value.get<std::vector<std::string>>();
      s.table[std::stoi(key)] = std::move(cycle);
    }
  }
  if (j.contains("error_step")) s.error_step = j.at("error_step").get<int>();
  if (j.contains("q")) s.q = j.at("q").get<double>();
  if (j.contains("q_by_prefix")) s.q_by_prefix = j.at("q_by_prefix").get<std::vector<double>>();
  if (j.contains("solution_len")) s.solution_len = j.at("solution_len").get<int>();
  if (s.solution_len < 1) throw ValidationError("mock script: solution_len must be positive");
  if (s.error_step && (*s.error_step < 1 || *s.error_step > s.solution_len))
    throw ValidationError("mock script: error_step must lie within the solution");
  for (double v : s.q_by_prefix)
    if (v < 0.0 || v > 1.0) throw ValidationError("mock script: q values must be in [0, 1]");
  if (s.q && (*s.q < 0.0 || *s.q > 1.0))
    throw ValidationError("mock script: q values must be in [0, 1]");
  return s;
}

std::string wrong_answer(const Problem& problem) { return problem.gold_answer + "_wrong"; }

std::string step_text(const char* family, int index) {
  std::ostringstream os;
  os << family << " " << index;
  return os.str();
}

}  // namespace

MockScript MockScript::parametric(double q, int solution_len) {
  MockProblemScript s;
  s.q = q;
  s.solution_len = solution_len;
  MockScript out;
  out.fallback = std::move(s);
  return out;
}

MockScript MockScript::from_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw ParseError("mock script: invalid JSON");
  MockScript out;
  if (j.contains("default")) out.fallback = script_from_json(j.at("default"));
  if (j.contains("problems"))
    for (const auto& [id, value] : j.at("problems").items())
      out.problems[id] = script_from_json(value);
  return out;
}

MockScript MockScript::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read mock script: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

MockBackend::MockBackend(MockScript script, std::uint64_t seed)
    : script_(std::move(script)), seed_(seed) {}

SampleResult MockBackend::generate(const Problem& problem, int prefix_len,
                                   int draw_index) const {
  const MockProblemScript* rule = nullptr;
  if (auto it = script_.problems.find(problem.id); it != script_.problems.end())
    rule = &it->second;
  else if (script_.fallback)
    rule = &*script_.fallback;
  if (rule == nullptr)
    return SampleResult{std::nullopt, "mock script has no rule for problem '" + problem.id + "'"};

  // 1. Scripted table.
  if (auto it = rule->table.find(prefix_len); it != rule->table.end()) {
    const auto& cycle = it->second;
    if (cycle.empty())
      return SampleResult{std::nullopt, "mock table cycle empty for prefix length " +
                                            std::to_string(prefix_len)};
    const std::string& text = cycle[static_cast<size_t>(draw_index) % cycle.size()];
    if (text.empty()) return SampleResult{std::nullopt, "empty completion"};
    return SampleResult{text, {}};
  }

  const int target_len = rule->solution_len;

  // 2. Scripted first-error fixture.
  if (rule->error_step) {
    const int err = *rule->error_step;
    std::string out;
    if (prefix_len == 0) {
      const bool flawed = draw_index % 2 == 0;
      for (int i = 1; i <= target_len; ++i) {
        out += "<step>";
        out += flawed ? step_text(i == err ? "flawed step" : "step", i)
                      : step_text("clean step", i);
        out += "</step>";
      }
      out += "<answer>" + (flawed ? wrong_answer(problem) : problem.gold_answer) + "</answer>";
    } else {
      const bool doomed = prefix_len >= err;
      for (int i = prefix_len + 1; i <= target_len; ++i) {
        out += "<step>";
        out += step_text(doomed ? "step" : "recovery step", i);
        out += "</step>";
      }
      out += "<answer>" + (doomed ? wrong_answer(problem) : problem.gold_answer) + "</answer>";
    }
    return SampleResult{std::move(out), {}};
  }

  // 3. Parametric generator.
  double q_here = -1.0;
  if (!rule->q_by_prefix.empty()) {
    const size_t idx =
        std::min(static_cast<size_t>(prefix_len), rule->q_by_prefix.size() - 1);
    q_here = rule->q_by_prefix[idx];
  } else if (rule->q) {
    q_here = *rule->q;
  }
  if (q_here < 0.0)
    return SampleResult{std::nullopt, "mock script has no rule for problem '" + problem.id + "'"};

  rng::Stream stream = rng::Stream(seed_)
                           .derive("mock")
                           .derive(problem.id)
                           .derive(static_cast<std::uint64_t>(prefix_len))
                           .derive(static_cast<std::uint64_t>(draw_index));
  const bool correct = stream.next_unit() < q_here;

  std::string out;
  for (int i = prefix_len + 1; i <= target_len; ++i)
    out += "<step>" + step_text("step", i) + "</step>";
  out += "<answer>" + (correct ? problem.gold_answer : wrong_answer(problem)) + "</answer>";
  return SampleResult{std::move(out), {}};
}

std::vector<SampleResult> MockBackend::complete(const CompletionRequest& request) {
  check_request(request);
  std::vector<SampleResult> results;
  results.reserve(static_cast<size_t>(request.n));

  std::int64_t completion_tokens = 0;
  for (int i = 0; i < request.n; ++i) {
    results.push_back(generate(*request.problem, static_cast<int>(request.prefix_steps.size()),
                               request.draw_base + i));
    if (results.back().text) completion_tokens += approx_token_count(*results.back().text);
  }

  std::int64_t prompt_tokens = approx_token_count(request.problem->question);
  for (const auto& step : request.prefix_steps) prompt_tokens += approx_token_count(step);
  ledger_.record_call(request.n);
  ledger_.record_tokens(prompt_tokens, completion_tokens);
  return results;
}

}  // namespace prmforge
