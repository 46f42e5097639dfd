#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "prmforge/scoring.hpp"
#include "prmforge/telemetry.hpp"
#include "prmforge/types.hpp"

namespace prmforge::rerank {

// Score-vector reductions, plus the Random selection baseline. Random is
// a selection rule only: it draws a candidate uniformly with a seeded
// generator and never consults the scores.
enum class AggregationMethod { Min, Max, Average, SumLogPr, SumLogOdds, MeanOdds, Random };

std::string to_string(AggregationMethod method);
AggregationMethod method_from_string(const std::string& name);  // ValidationError on unknown

// All seven methods, Random last.
std::span<const AggregationMethod> all_methods();
// The six score aggregators (no Random).
std::span<const AggregationMethod> score_methods();

/**
 * Reduces a step-score vector to a scalar path score:
 *   Min        = min p_i
 *   Max        = max p_i
 *   Average    = (1/T) Σ p_i
 *   SumLogPr   = Σ ln p_i
 *   SumLogOdds = Σ ln(p_i / (1-p_i))
 *   MeanOdds   = (1/T) Σ p_i / (1-p_i)
 * Inputs are already clamped by StepScoreVector, so results are finite.
 * Empty vector → ValidationError; Random → ValidationError (it is not an
 * aggregator).
 */
double aggregate(const scoring::StepScoreVector& scores, AggregationMethod method);

struct Candidate {
  Solution solution;
  scoring::StepScoreVector scores;
};

/**
 * Winner index among candidates. Non-Random methods take the argmax of
 * aggregate(), ties broken by lowest index; Random draws uniformly from
 * the seeded generator. Empty list → ValidationError; a score vector
 * whose length differs from its solution's step count → ValidationError.
 */
size_t select_best(std::span<const Candidate> candidates, AggregationMethod method,
                   std::uint64_t seed);

struct MethodAccuracy {
  AggregationMethod method = AggregationMethod::Average;
  int correct = 0;
  double accuracy = 0.0;
};

struct EvalReport {
  int n = 0;
  std::uint64_t seed = 0;
  int problems = 0;
  int scoring_failures = 0;  // candidates that could not be scored
  std::vector<MethodAccuracy> per_method;

  std::string to_json_text() const;
};

/**
 * Best-of-N answer accuracy over a problem set. For each problem the
 * first n candidates are scored once, every method selects its winner
 * from the shared scores, and the winner's final answer is verified
 * against the gold answer.
 *
 * Every problem must supply at least n candidates (ValidationError). A
 * candidate whose scoring throws is logged and assigned -inf under every
 * aggregator, so it never wins unless every candidate failed (then the
 * tie rule picks index 0). Random draws are derived per problem id from
 * the seed.
 */
EvalReport evaluate_accuracy(std::span<const Problem> problems,
                             const std::function<std::span<const Solution>(const Problem&)>&
                                 candidates_for,
                             scoring::StepScorer& scorer,
                             std::span<const AggregationMethod> methods, int n,
                             std::uint64_t seed, TelemetrySink* telemetry = nullptr);

}  // namespace prmforge::rerank
