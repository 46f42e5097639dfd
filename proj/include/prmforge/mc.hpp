#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prmforge/backend.hpp"
#include "prmforge/budget.hpp"
#include "prmforge/types.hpp"

namespace prmforge {

// One completion sampled from a prefix, with its verified correctness.
// `full_path` is the prefix plus the continuation; it is absent when the
// continuation failed to parse (or produced a stepless path), in which
// case the rollout counts as incorrect.
struct RolloutRecord {
  int prefix_len = 0;
  int draw_index = 0;
  std::optional<Solution> full_path;
  bool correct = false;
};

// Monte Carlo estimate of the probability that completions from a prefix
// reach the correct final answer. value is always the exact ratio
// n_correct / n_rollouts of the recorded rollouts.
struct MCEstimate {
  double value = 0.0;
  int n_rollouts = 0;
  int n_correct = 0;
  std::vector<RolloutRecord> rollouts;

  static MCEstimate from_rollouts(std::vector<RolloutRecord> rollouts);

  // Pooled evidence over the same prefix: (c1+c2)/(n1+n2).
  MCEstimate merged_with(const MCEstimate& other) const;
};

/**
 * Draws min(k, remaining budget) rollouts from the prefix via the policy
 * backend, verifies each continuation's final answer against the gold
 * answer, and debits the budget by the rollouts actually drawn.
 *
 * Unparseable completions and per-sample backend failures count as
 * incorrect. Throws BudgetExhausted when no rollout can be drawn at all.
 */
MCEstimate estimate_mc(PolicyBackend& backend, const Problem& problem,
                       std::span<const std::string> prefix, const SamplingParams& params,
                       int k, SearchBudget& budget, int draw_base = 0);

/**
 * Per-problem estimator with a prefix-keyed cache. The first query of a
 * prefix draws k rollouts; repeat queries pool the cached evidence without
 * spending budget.
 */
class McEstimator {
 public:
  McEstimator(PolicyBackend& backend, const Problem& problem, SamplingParams params,
              int k_per_prefix);

  const MCEstimate& estimate(std::span<const std::string> prefix, SearchBudget& budget);

  bool has_estimate(std::span<const std::string> prefix) const;
  const MCEstimate* find(std::span<const std::string> prefix) const;

  // Ordered view of every cached estimate, keyed by prefix.
  const std::map<std::vector<std::string>, MCEstimate>& cached() const { return cache_; }

 private:
  PolicyBackend& backend_;
  const Problem& problem_;
  SamplingParams params_;
  int k_per_prefix_;
  int next_draw_ = 0;  // rollout draws consumed so far for this problem
  std::map<std::vector<std::string>, MCEstimate> cache_;
};

}  // namespace prmforge
