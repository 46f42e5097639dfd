#pragma once

#include <atomic>

#include "prmforge/error.hpp"

namespace prmforge {

struct BudgetSnapshot {
  int max_search_steps = 0;
  int max_rollouts = 0;
  int used_search_steps = 0;
  int used_rollouts = 0;
};

/**
 * Per-problem search/rollout ledger. Counters update atomically; usage
 * never exceeds either cap.
 */
class SearchBudget {
 public:
  SearchBudget(int max_search_steps, int max_rollouts)
      : max_search_steps_(max_search_steps), max_rollouts_(max_rollouts) {
    if (max_search_steps < 0 || max_rollouts < 0)
      throw ValidationError("budget caps must be nonnegative");
  }

  // Grants min(want, remaining) rollouts, possibly zero.
  int acquire_rollouts(int want) {
    if (want < 0) throw ValidationError("rollout request must be nonnegative");
    int used = used_rollouts_.load(std::memory_order_relaxed);
    while (true) {
      const int granted = std::min(want, max_rollouts_ - used);
      if (granted <= 0) return 0;
      if (used_rollouts_.compare_exchange_weak(used, used + granted,
                                               std::memory_order_relaxed))
        return granted;
    }
  }

  // Claims one search step. False when the cap is already reached.
  bool try_take_search_step() {
    int used = used_search_steps_.load(std::memory_order_relaxed);
    while (used < max_search_steps_) {
      if (used_search_steps_.compare_exchange_weak(used, used + 1,
                                                   std::memory_order_relaxed))
        return true;
    }
    return false;
  }

  int remaining_rollouts() const {
    return max_rollouts_ - used_rollouts_.load(std::memory_order_relaxed);
  }
  int used_rollouts() const { return used_rollouts_.load(std::memory_order_relaxed); }
  int used_search_steps() const {
    return used_search_steps_.load(std::memory_order_relaxed);
  }
  int max_rollouts() const { return max_rollouts_; }
  int max_search_steps() const { return max_search_steps_; }

  BudgetSnapshot snapshot() const {
    return BudgetSnapshot{max_search_steps_, max_rollouts_, used_search_steps(),
                          used_rollouts()};
  }

 private:
  int max_search_steps_;
  int max_rollouts_;
  std::atomic<int> used_search_steps_{0};
  std::atomic<int> used_rollouts_{0};
};

}  // namespace prmforge
