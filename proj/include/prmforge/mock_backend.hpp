#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prmforge/backend.hpp"

namespace prmforge {

/**
 * Per-problem rule for the scripted mock policy. Rules are tried in order:
 *
 *   1. table      — exact prefix-length key mapping to a cycle of raw
 *                   completion texts, indexed by draw index.
 *   2. error_step — scripted first-error fixture: root draws alternate
 *                   between a flawed full solution (even draws, wrong
 *                   answer) and a clean one (odd draws, gold answer);
 *                   continuations from prefixes shorter than the error
 *                   step recover to the gold answer, continuations at or
 *                   past it stay wrong.
 *   3. q_by_prefix / q — parametric generator: a draw from a length-L
 *                   prefix is correct with probability q(L), decided by a
 *                   unit draw keyed on (seed, problem id, L, draw index).
 *
 * A problem with no applicable rule yields per-sample refusal errors.
 */
struct MockProblemScript {
  std::map<int, std::vector<std::string>> table;
  std::optional<int> error_step;
  std::optional<double> q;
  std::vector<double> q_by_prefix;
  int solution_len = 3;
};

struct MockScript {
  std::optional<MockProblemScript> fallback;
  std::map<std::string, MockProblemScript> problems;

  static MockScript parametric(double q, int solution_len = 3);
  static MockScript from_json_text(const std::string& text);
  static MockScript load_file(const std::string& path);
};

/**
 * Deterministic scripted policy. A sample is a pure function of
 * (problem id, prefix length, draw index, seed), so serial and batched
 * sampling agree and repeated runs are bit-identical.
 */
class MockBackend : public PolicyBackend {
 public:
  MockBackend(MockScript script, std::uint64_t seed);

  std::vector<SampleResult> complete(const CompletionRequest& request) override;

  std::uint64_t seed() const { return seed_; }

 private:
  SampleResult generate(const Problem& problem, int prefix_len, int draw_index) const;

  MockScript script_;
  std::uint64_t seed_;
};

}  // namespace prmforge
