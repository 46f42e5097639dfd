#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prmforge/types.hpp"

namespace prmforge {

// Shared call/token counters. Safe to update from multiple workers.
class UsageLedger {
 public:
  void record_call(std::int64_t samples) {
    calls_.fetch_add(1, std::memory_order_relaxed);
    samples_.fetch_add(samples, std::memory_order_relaxed);
  }
  void record_tokens(std::int64_t prompt, std::int64_t completion) {
    prompt_tokens_.fetch_add(prompt, std::memory_order_relaxed);
    completion_tokens_.fetch_add(completion, std::memory_order_relaxed);
  }

  std::int64_t calls() const { return calls_.load(std::memory_order_relaxed); }
  std::int64_t samples() const { return samples_.load(std::memory_order_relaxed); }
  std::int64_t prompt_tokens() const { return prompt_tokens_.load(std::memory_order_relaxed); }
  std::int64_t completion_tokens() const {
    return completion_tokens_.load(std::memory_order_relaxed);
  }

 private:
  std::atomic<std::int64_t> calls_{0};
  std::atomic<std::int64_t> samples_{0};
  std::atomic<std::int64_t> prompt_tokens_{0};
  std::atomic<std::int64_t> completion_tokens_{0};
};

struct CompletionRequest {
  const Problem* problem = nullptr;
  std::vector<std::string> prefix_steps;
  SamplingParams params;
  int n = 1;
  // Index of the first draw in this batch. Keys mock determinism so that
  // batched and one-at-a-time sampling produce identical sequences.
  int draw_base = 0;
};

// One sampled continuation. `text` holds the continuation only (the prefix
// is never echoed); a refusal or empty output leaves `text` unset and
// `error` filled, without affecting the other samples in the batch.
struct SampleResult {
  std::optional<std::string> text;
  std::string error;
};

/**
 * Abstract generative policy. complete() must be safely callable from
 * multiple workers at once; usage accounting goes through the shared
 * ledger. Transport-level failures throw (TransportError after retries,
 * AuthError on credential rejection); per-sample failures surface in the
 * returned slots.
 */
class PolicyBackend {
 public:
  virtual ~PolicyBackend() = default;

  // Returns exactly request.n results.
  virtual std::vector<SampleResult> complete(const CompletionRequest& request) = 0;

  UsageLedger& ledger() { return ledger_; }
  const UsageLedger& ledger() const { return ledger_; }

 protected:
  // Shared precondition checks for implementations.
  void check_request(const CompletionRequest& request) const;

  UsageLedger ledger_;
};

// Rough whitespace-delimited token count, used where the service does not
// report usage.
std::int64_t approx_token_count(std::string_view text);

}  // namespace prmforge
