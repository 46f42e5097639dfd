#include "prmforge/mc.hpp"

#include "prmforge/answers.hpp"
#include "prmforge/cot.hpp"
#include "prmforge/error.hpp"

namespace prmforge {

MCEstimate MCEstimate::from_rollouts(std::vector<RolloutRecord> rollouts) {
  MCEstimate est;
  est.n_rollouts = static_cast<int>(rollouts.size());
  if (est.n_rollouts == 0) throw ValidationError("an MC estimate needs at least one rollout");
  for (const auto& r : rollouts)
    if (r.correct) ++est.n_correct;
  est.value = static_cast<double>(est.n_correct) / est.n_rollouts;
  est.rollouts = std::move(rollouts);
  return est;
}

MCEstimate MCEstimate::merged_with(const MCEstimate& other) const {
  MCEstimate merged;
  merged.rollouts = rollouts;
  merged.rollouts.insert(merged.rollouts.end(), other.rollouts.begin(), other.rollouts.end());
  merged.n_rollouts = n_rollouts + other.n_rollouts;
  merged.n_correct = n_correct + other.n_correct;
  merged.value = static_cast<double>(merged.n_correct) / merged.n_rollouts;
  return merged;
}

MCEstimate estimate_mc(PolicyBackend& backend, const Problem& problem,
                       std::span<const std::string> prefix, const SamplingParams& params,
                       int k, SearchBudget& budget, int draw_base) {
  if (k < 1) throw ValidationError("estimate_mc requires k >= 1");

  const int granted = budget.acquire_rollouts(k);
  if (granted == 0) throw BudgetExhausted("rollout budget exhausted before any draw");

  CompletionRequest request;
  request.problem = &problem;
  request.prefix_steps.assign(prefix.begin(), prefix.end());
  request.params = params;
  request.n = granted;
  request.draw_base = draw_base;

  const auto samples = backend.complete(request);

  std::vector<RolloutRecord> rollouts;
  rollouts.reserve(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    RolloutRecord record;
    record.prefix_len = static_cast<int>(prefix.size());
    record.draw_index = draw_base + static_cast<int>(i);
    if (samples[i].text) {
      try {
        cot::Continuation cont = cot::parse_continuation(*samples[i].text);
        std::vector<std::string> steps(prefix.begin(), prefix.end());
        steps.insert(steps.end(), cont.steps.begin(), cont.steps.end());
        if (!steps.empty()) {
          Solution path{std::move(steps), std::move(cont.answer)};
          record.correct =
              answers::verify_answer(path.final_answer, problem.gold_answer, problem.kind);
          record.full_path = std::move(path);
        }
      } catch (const ParseError&) {
        // counted as incorrect
      }
    }
    rollouts.push_back(std::move(record));
  }
  return MCEstimate::from_rollouts(std::move(rollouts));
}

McEstimator::McEstimator(PolicyBackend& backend, const Problem& problem,
                         SamplingParams params, int k_per_prefix)
    : backend_(backend), problem_(problem), params_(params), k_per_prefix_(k_per_prefix) {
  if (k_per_prefix < 1) throw ValidationError("k per prefix must be >= 1");
}

const MCEstimate& McEstimator::estimate(std::span<const std::string> prefix,
                                        SearchBudget& budget) {
  std::vector<std::string> key(prefix.begin(), prefix.end());
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  MCEstimate est =
      estimate_mc(backend_, problem_, prefix, params_, k_per_prefix_, budget, next_draw_);
  next_draw_ += est.n_rollouts;
  return cache_.emplace(std::move(key), std::move(est)).first->second;
}

bool McEstimator::has_estimate(std::span<const std::string> prefix) const {
  return find(prefix) != nullptr;
}

const MCEstimate* McEstimator::find(std::span<const std::string> prefix) const {
  std::vector<std::string> key(prefix.begin(), prefix.end());
  auto it = cache_.find(key);
  return it == cache_.end() ? nullptr : &it->second;
}

}  // namespace prmforge
