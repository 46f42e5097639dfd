#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prmforge/backend.hpp"
#include "prmforge/budget.hpp"
#include "prmforge/dataset.hpp"
#include "prmforge/mc.hpp"
#include "prmforge/telemetry.hpp"
#include "prmforge/tree.hpp"
#include "prmforge/types.hpp"

namespace prmforge::annotate {

struct AnnotatorConfig {
  double c_puct = 0.125;
  int k_rollouts = 8;
  SamplingParams sampling;      // temperature 1.0, top_k 50, top_p 0.9
  int max_search_steps = 200;   // per problem
  int max_rollouts = 1000;      // per problem
};

void validate(const AnnotatorConfig& config);

/**
 * Selection priority of a searchable node:
 *   Q(node) + c_puct * sqrt(parent_visits) / (1 + node.visits)
 * with Q(node) = 1 - |2*MC(node) - 1|, which peaks at MC = 0.5 so the
 * search concentrates where correctness is most uncertain.
 *
 * Requires an attached estimate and parent_visits >= 1 (ValidationError).
 */
double selection_score(const tree::TreeNode& node, int parent_visits, double c_puct);

// MC evaluator used during error localization. Implementations debit the
// given budget for fresh draws and may throw BudgetExhausted.
using McFn = std::function<MCEstimate(std::span<const std::string> prefix, SearchBudget& budget)>;

/**
 * Binary search for the earliest failing step of a known-incorrect path:
 * the smallest t in [1, T] with MC(steps[1..t]) == 0 under mc_fn.
 *
 * Assumes MC is monotone along the path (an extension of a hopeless
 * prefix stays hopeless); the final probe re-checks the candidate, and a
 * path where no prefix has MC == 0 yields nullopt (sampling noise — the
 * caller discards the path). Probes at most ceil(log2(T)) + 1 distinct
 * prefixes. BudgetExhausted from mc_fn propagates.
 */
std::optional<int> locate_first_error(const Problem& problem, const Solution& solution,
                                      const McFn& mc_fn, SearchBudget& budget);

struct AnnotateResult {
  std::vector<dataset::StepAnnotation> annotations;
  BudgetSnapshot budget;
  bool skipped = false;      // uninformative problem: root MC was 0 or 1
  std::string skip_reason;   // human-readable cause when skipped
};

/**
 * Annotates one problem end to end:
 *  1. Estimate MC at the root (empty prefix). Root MC of exactly 0 or 1
 *     means no error boundary exists; the problem is skipped with no
 *     annotations.
 *  2. Repeat until the budget runs out or no unsearched incorrect rollout
 *     remains: pick the node maximizing selection_score among nodes with
 *     MC > 0 and a non-empty pool (ties broken by lexicographically
 *     smallest prefix), pop one pooled rollout, and binary-search its
 *     first error; every prefix evaluated along the way becomes a tree
 *     node with a pooled estimate.
 *  3. Harvest one annotation per evaluated non-root node, labeled with
 *     the node's pooled MC at harvest time.
 *
 * Budget exhaustion ends the loop gracefully; annotations gathered so far
 * are always returned.
 */
AnnotateResult annotate_problem(const Problem& problem, PolicyBackend& backend,
                                const AnnotatorConfig& config, SearchBudget& budget,
                                TelemetrySink* telemetry = nullptr);

}  // namespace prmforge::annotate
