#include "prmforge/rerank.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include <nlohmann/json.hpp>

#include "prmforge/answers.hpp"
#include "prmforge/error.hpp"
#include "prmforge/rng.hpp"

namespace prmforge::rerank {

using nlohmann::json;

namespace {

constexpr std::array<AggregationMethod, 7> kAllMethods = {
    AggregationMethod::Min,        AggregationMethod::Max,
    AggregationMethod::Average,    AggregationMethod::SumLogPr,
    AggregationMethod::SumLogOdds, AggregationMethod::MeanOdds,
    AggregationMethod::Random};

std::string lowercase(std::string s) {
  for (char& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

}  // namespace

std::string to_string(AggregationMethod method) {
  switch (method) {
    case AggregationMethod::Min:
      return "Min";
    case AggregationMethod::Max:
      return "Max";
    case AggregationMethod::Average:
      return "Average";
    case AggregationMethod::SumLogPr:
      return "SumLogPr";
    case AggregationMethod::SumLogOdds:
      return "SumLogOdds";
    case AggregationMethod::MeanOdds:
      return "MeanOdds";
    case AggregationMethod::Random:
      return "Random";
  }
  throw ValidationError("unknown aggregation method");
}

AggregationMethod method_from_string(const std::string& name) {
  const std::string folded = lowercase(name);
  for (AggregationMethod m : kAllMethods)
    if (folded == lowercase(to_string(m))) return m;
  throw ValidationError("unknown aggregation method: '" + name + "'");
}

std::span<const AggregationMethod> all_methods() { return kAllMethods; }

std::span<const AggregationMethod> score_methods() {
  return std::span<const AggregationMethod>(kAllMethods).first(6);
}

double aggregate(const scoring::StepScoreVector& scores, AggregationMethod method) {
  if (method == AggregationMethod::Random)
    throw ValidationError("Random is a selection rule, not an aggregator");
  if (scores.empty()) throw ValidationError("cannot aggregate an empty score vector");

  const auto& p = scores.probs();
  const double t = static_cast<double>(p.size());
  switch (method) {
    case AggregationMethod::Min:
      return *std::min_element(p.begin(), p.end());
    case AggregationMethod::Max:
      return *std::max_element(p.begin(), p.end());
    case AggregationMethod::Average: {
      double sum = 0.0;
      for (double v : p) sum += v;
      return sum / t;
    }
    case AggregationMethod::SumLogPr: {
      double sum = 0.0;
      for (double v : p) sum += std::log(v);
      return sum;
    }
    case AggregationMethod::SumLogOdds: {
      double sum = 0.0;
      for (double v : p) sum += std::log(v / (1.0 - v));
      return sum;
    }
    case AggregationMethod::MeanOdds: {
      double sum = 0.0;
      for (double v : p) sum += v / (1.0 - v);
      return sum / t;
    }
    case AggregationMethod::Random:
      break;  // unreachable, rejected above
  }
  throw ValidationError("unknown aggregation method");
}

namespace {

// Argmax with lowest-index ties over possibly-failed aggregates.
size_t argmax_index(std::span<const double> values) {
  size_t best = 0;
  for (size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

}  // namespace

size_t select_best(std::span<const Candidate> candidates, AggregationMethod method,
                   std::uint64_t seed) {
  if (candidates.empty()) throw ValidationError("select_best needs at least one candidate");
  for (const auto& c : candidates) {
    validate(c.solution);
    if (c.scores.size() != c.solution.steps.size())
      throw ValidationError("score vector length does not match the solution's step count");
  }
  if (method == AggregationMethod::Random)
    return rng::Stream(seed).derive("random-select").next_below(candidates.size());

  std::vector<double> values;
  values.reserve(candidates.size());
  for (const auto& c : candidates) values.push_back(aggregate(c.scores, method));
  return argmax_index(values);
}

std::string EvalReport::to_json_text() const {
  json j;
  j["n"] = n;
  j["seed"] = seed;
  j["problems"] = problems;
  j["scoring_failures"] = scoring_failures;
  json accuracy = json::object();
  for (const auto& m : per_method) accuracy[to_string(m.method)] = m.accuracy;
  j["accuracy"] = accuracy;
  return j.dump(2);
}

EvalReport evaluate_accuracy(std::span<const Problem> problems,
                             const std::function<std::span<const Solution>(const Problem&)>&
                                 candidates_for,
                             scoring::StepScorer& scorer,
                             std::span<const AggregationMethod> methods, int n,
                             std::uint64_t seed, TelemetrySink* telemetry) {
  if (n < 1) throw ValidationError("n must be positive");
  if (methods.empty()) throw ValidationError("at least one method is required");

  EvalReport report;
  report.n = n;
  report.seed = seed;
  report.problems = static_cast<int>(problems.size());
  report.per_method.resize(methods.size());
  for (size_t m = 0; m < methods.size(); ++m) report.per_method[m].method = methods[m];

  constexpr double kFailed = -std::numeric_limits<double>::infinity();

  for (const auto& problem : problems) {
    validate(problem);
    const std::span<const Solution> pool = candidates_for(problem);
    if (static_cast<int>(pool.size()) < n)
      throw ValidationError("problem '" + problem.id + "' has " +
                            std::to_string(pool.size()) + " candidates, need " +
                            std::to_string(n));
    const auto candidates = pool.first(static_cast<size_t>(n));

    // Score once; every method shares the vectors.
    std::vector<std::optional<scoring::StepScoreVector>> scores(candidates.size());
    for (size_t i = 0; i < candidates.size(); ++i) {
      try {
        scores[i] = scoring::score_path(problem, candidates[i], scorer);
      } catch (const Error& e) {
        ++report.scoring_failures;
        if (telemetry != nullptr)
          telemetry->emit(json{{"event", "scoring_failure"},
                               {"problem", problem.id},
                               {"candidate", i},
                               {"error", e.what()}}
                              .dump());
      }
    }

    for (size_t m = 0; m < methods.size(); ++m) {
      size_t winner = 0;
      if (methods[m] == AggregationMethod::Random) {
        winner = rng::Stream(seed)
                     .derive("random-select")
                     .derive(problem.id)
                     .next_below(candidates.size());
      } else {
        std::vector<double> values(candidates.size(), kFailed);
        for (size_t i = 0; i < candidates.size(); ++i)
          if (scores[i]) values[i] = aggregate(*scores[i], methods[m]);
        winner = argmax_index(values);
      }
      if (answers::verify_answer(candidates[winner].final_answer, problem.gold_answer,
                                 problem.kind))
        ++report.per_method[m].correct;
    }
  }

  for (auto& m : report.per_method)
    m.accuracy = report.problems == 0
                     ? 0.0
                     : static_cast<double>(m.correct) / report.problems;
  return report;
}

}  // namespace prmforge::rerank
