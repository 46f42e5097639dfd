#include "prmforge/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "prmforge/answers.hpp"
#include "prmforge/cot.hpp"
#include "prmforge/error.hpp"
#include "prmforge/rng.hpp"

namespace prmforge::scoring {

double clamp_probability(double p) {
  if (!std::isfinite(p)) throw ValidationError("probability must be finite");
  return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

StepScoreVector::StepScoreVector(std::vector<double> probs) : probs_(std::move(probs)) {
  for (double& p : probs_) p = clamp_probability(p);
}

double step_probability(double z_yes, double z_no) {
  if (!std::isfinite(z_yes) || !std::isfinite(z_no))
    throw ValidationError("logits must be finite");
  const double m = std::max(z_yes, z_no);
  const double ey = std::exp(z_yes - m);
  const double en = std::exp(z_no - m);
  return ey / (ey + en);
}

double prm_loss(std::span<const double> preds, std::span<const double> targets) {
  if (preds.size() != targets.size())
    throw ValidationError("prediction and target lengths differ");
  if (preds.empty()) throw ValidationError("prm_loss needs at least one step");
  double loss = 0.0;
  for (size_t i = 0; i < preds.size(); ++i) {
    const double y = targets[i];
    if (!std::isfinite(y) || y < 0.0 || y > 1.0)
      throw ValidationError("targets must lie in [0, 1]");
    const double p = clamp_probability(preds[i]);
    loss -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
  }
  return loss;
}

OracleScorer::OracleScorer()
    : error_at_([](const Problem& problem, const Solution& solution) -> std::optional<int> {
        if (answers::verify_answer(solution.final_answer, problem.gold_answer, problem.kind))
          return std::nullopt;
        return 1;
      }) {}

OracleScorer::OracleScorer(ErrorFn error_at) : error_at_(std::move(error_at)) {
  if (!error_at_) throw ValidationError("oracle scorer needs an error rule");
}

StepScoreVector OracleScorer::score(const Problem& problem, const Solution& solution) {
  validate(solution);
  const std::optional<int> error = error_at_(problem, solution);
  if (error && (*error < 1 || *error > static_cast<int>(solution.steps.size())))
    throw ValidationError("planted error index out of range");
  std::vector<double> probs(solution.steps.size(), 1.0 - kProbClamp);
  if (error)
    for (size_t i = static_cast<size_t>(*error) - 1; i < probs.size(); ++i) probs[i] = kProbClamp;
  return StepScoreVector(std::move(probs));
}

ConstantScorer::ConstantScorer(double p) : p_(clamp_probability(p)) {}

StepScoreVector ConstantScorer::score(const Problem& /*problem*/, const Solution& solution) {
  validate(solution);
  return StepScoreVector(std::vector<double>(solution.steps.size(), p_));
}

SeededRandomScorer::SeededRandomScorer(std::uint64_t seed) : seed_(seed) {}

StepScoreVector SeededRandomScorer::score(const Problem& problem, const Solution& solution) {
  validate(solution);
  const rng::Stream path_stream = rng::Stream(seed_)
                                      .derive("scorer")
                                      .derive(problem.id)
                                      .derive(cot::render_solution(solution));
  std::vector<double> probs(solution.steps.size());
  for (size_t i = 0; i < probs.size(); ++i)
    probs[i] = path_stream.derive(static_cast<std::uint64_t>(i)).next_unit();
  return StepScoreVector(std::move(probs));
}

StepScoreVector score_path(const Problem& problem, const Solution& solution, StepScorer& scorer) {
  validate(problem);
  validate(solution);
  StepScoreVector scores = scorer.score(problem, solution);
  if (scores.size() != solution.steps.size())
    throw ProtocolError("scorer returned " + std::to_string(scores.size()) +
                        " probabilities for a " + std::to_string(solution.steps.size()) +
                        "-step path");
  return scores;
}

}  // namespace prmforge::scoring
