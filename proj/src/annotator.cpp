#include "prmforge/annotator.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "prmforge/error.hpp"

namespace prmforge::annotate {

using nlohmann::json;

void validate(const AnnotatorConfig& config) {
  if (!(config.c_puct >= 0.0)) throw ValidationError("c_puct must be nonnegative");
  if (config.k_rollouts < 1) throw ValidationError("k_rollouts must be positive");
  if (config.max_search_steps < 1) throw ValidationError("max_search_steps must be positive");
  if (config.max_rollouts < 1) throw ValidationError("max_rollouts must be positive");
  prmforge::validate(config.sampling);
}

double selection_score(const tree::TreeNode& node, int parent_visits, double c_puct) {
  if (!node.mc || node.mc->n_rollouts < 1)
    throw ValidationError("selection_score requires a node with an estimate");
  if (parent_visits < 1) throw ValidationError("parent_visits must be positive");
  const double q = 1.0 - std::abs(2.0 * node.mc->value - 1.0);
  const double u = c_puct * std::sqrt(static_cast<double>(parent_visits)) / (1.0 + node.visits);
  return q + u;
}

std::optional<int> locate_first_error(const Problem& problem, const Solution& solution,
                                      const McFn& mc_fn, SearchBudget& budget) {
  prmforge::validate(problem);
  prmforge::validate(solution);

  const auto mc_at = [&](int t) {
    std::span<const std::string> prefix(solution.steps.data(), static_cast<size_t>(t));
    return mc_fn(prefix, budget).value;
  };

  int lo = 1;
  int hi = static_cast<int>(solution.steps.size());
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (mc_at(mid) == 0.0)
      hi = mid;
    else
      lo = mid + 1;
  }
  // Re-check the candidate: when no prefix is hopeless the loop converges
  // on T without ever observing a zero.
  if (mc_at(lo) == 0.0) return lo;
  return std::nullopt;
}

namespace {

void log_event(TelemetrySink* telemetry, const Problem& problem, std::string_view kind,
               const SearchBudget& budget, json extras = json::object()) {
  if (telemetry == nullptr) return;
  json event = std::move(extras);
  event["problem"] = problem.id;
  event["event"] = std::string(kind);
  event["used_search_steps"] = budget.used_search_steps();
  event["used_rollouts"] = budget.used_rollouts();
  telemetry->emit(event.dump());
}

}  // namespace

AnnotateResult annotate_problem(const Problem& problem, PolicyBackend& backend,
                                const AnnotatorConfig& config, SearchBudget& budget,
                                TelemetrySink* telemetry) {
  prmforge::validate(problem);
  validate(config);

  AnnotateResult result;
  tree::AnnotationTree tree;
  McEstimator estimator(backend, problem, config.sampling, config.k_rollouts);

  // Evaluates a prefix, caching per prefix; a fresh evaluation also
  // materializes the tree node and feeds its incorrect-rollout pool.
  const McFn evaluate = [&](std::span<const std::string> prefix,
                            SearchBudget& b) -> MCEstimate {
    const bool fresh = !estimator.has_estimate(prefix);
    const MCEstimate& est = estimator.estimate(prefix, b);
    if (fresh) {
      tree::TreeNode& node = tree.insert_prefix(prefix);
      tree.set_estimate(node, est);
      log_event(telemetry, problem, "mc_estimate", b,
                json{{"prefix_len", prefix.size()}, {"mc", est.value}});
    }
    return est;
  };

  const auto finish = [&]() {
    tree.check_structure();
    tree.walk([&](const tree::TreeNode& node) {
      if (!node.mc || node.is_root()) return;
      dataset::StepAnnotation a;
      a.problem_id = problem.id;
      a.prefix.assign(node.prefix.begin(), node.prefix.end() - 1);
      a.step = node.prefix.back();
      a.soft_label = node.mc->value;
      a.n_rollouts = node.mc->n_rollouts;
      a.n_correct = node.mc->n_correct;
      result.annotations.push_back(std::move(a));
    });
    result.budget = budget.snapshot();
    log_event(telemetry, problem, "problem_done", budget,
              json{{"annotations", result.annotations.size()},
                   {"skipped", result.skipped}});
    return result;
  };

  // (1) Root estimate. A problem the policy always or never solves has no
  // error boundary to localize, so it yields nothing.
  double root_mc = 0.0;
  try {
    root_mc = evaluate({}, budget).value;
  } catch (const BudgetExhausted&) {
    result.skipped = true;
    result.skip_reason = "rollout budget exhausted before the root estimate";
    return finish();
  }
  if (root_mc == 0.0 || root_mc == 1.0) {
    result.skipped = true;
    result.skip_reason = root_mc == 0.0 ? "no rollout reached the gold answer"
                                        : "every rollout reached the gold answer";
    log_event(telemetry, problem, "skip", budget, json{{"reason", result.skip_reason}});
    return finish();  // only the root was evaluated, so this emits nothing
  }

  // (2) Selection / localization loop.
  int total_selections = 0;
  while (true) {
    std::vector<tree::TreeNode*> candidates;
    tree.walk([&](tree::TreeNode& node) {
      if (node.mc && node.mc->value > 0.0 && !node.incorrect_pool.empty())
        candidates.push_back(&node);
    });
    if (candidates.empty()) break;  // nothing left to search
    if (!budget.try_take_search_step()) {
      log_event(telemetry, problem, "search_budget_exhausted", budget);
      break;
    }

    const int parent_visits = total_selections + 1;
    tree::TreeNode* best = nullptr;
    double best_score = 0.0;
    for (tree::TreeNode* node : candidates) {
      const double score = selection_score(*node, parent_visits, config.c_puct);
      if (best == nullptr || score > best_score ||
          (score == best_score && node->prefix < best->prefix)) {
        best = node;
        best_score = score;
      }
    }
    ++best->visits;
    ++total_selections;
    log_event(telemetry, problem, "select", budget,
              json{{"prefix_len", best->prefix.size()}, {"score", best_score},
                   {"visits", best->visits}});

    RolloutRecord rollout = std::move(best->incorrect_pool.front());
    best->incorrect_pool.pop_front();

    try {
      const auto first_error = locate_first_error(problem, *rollout.full_path, evaluate, budget);
      if (first_error)
        log_event(telemetry, problem, "error_located", budget,
                  json{{"step", *first_error}});
      else
        log_event(telemetry, problem, "no_error_found", budget);
    } catch (const BudgetExhausted&) {
      log_event(telemetry, problem, "rollout_budget_exhausted", budget);
      break;
    }
  }

  // (3) Harvest every evaluated prefix, labels pooled as of now.
  return finish();
}

}  // namespace prmforge::annotate
