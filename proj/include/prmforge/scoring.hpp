#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "prmforge/types.hpp"

namespace prmforge::scoring {

// Probabilities are clamped into [kProbClamp, 1 - kProbClamp] before any
// log or odds computation, so every aggregate stays finite.
inline constexpr double kProbClamp = 1e-6;

// Clamps into [kProbClamp, 1 - kProbClamp]; non-finite → ValidationError.
double clamp_probability(double p);

// One predicted step-correctness probability per reasoning step, in path
// order. Values are clamped at construction and immutable afterwards.
class StepScoreVector {
 public:
  StepScoreVector() = default;
  explicit StepScoreVector(std::vector<double> probs);

  const std::vector<double>& probs() const { return probs_; }
  double operator[](size_t i) const { return probs_[i]; }
  size_t size() const { return probs_.size(); }
  bool empty() const { return probs_.empty(); }
  auto begin() const { return probs_.begin(); }
  auto end() const { return probs_.end(); }

  bool operator==(const StepScoreVector&) const = default;

 private:
  std::vector<double> probs_;
};

/**
 * Two-logit softmax: exp(z_yes) / (exp(z_yes) + exp(z_no)), computed with
 * the max logit subtracted first so extreme logits never overflow. The
 * result is translation-invariant in (z_yes, z_no). Non-finite logits →
 * ValidationError.
 */
double step_probability(double z_yes, double z_no);

/**
 * Summed soft-label cross-entropy, no mean reduction:
 *   -Σ_i [ y_i·ln(p_i) + (1-y_i)·ln(1-p_i) ]
 * Predictions are clamped before the logs; targets must lie in [0, 1].
 * Lengths must match and be ≥ 1 (ValidationError otherwise).
 */
double prm_loss(std::span<const double> preds, std::span<const double> targets);

// Assigns one correctness probability per step of a solution.
class StepScorer {
 public:
  virtual ~StepScorer() = default;

  // Must return exactly one probability per step. Remote implementations
  // throw TransportError on connectivity failure after retries and
  // ProtocolError on malformed replies.
  virtual StepScoreVector score(const Problem& problem, const Solution& solution) = 0;
};

/**
 * Planted-error reference scorer: steps strictly before the first bad
 * step score 1 - kProbClamp, the bad step and everything after score
 * kProbClamp, and a path without an error scores 1 - kProbClamp
 * throughout.
 *
 * The error position comes from a caller-supplied rule; the default rule
 * plants the error at step 1 whenever the final answer fails verification
 * against the gold answer, and reports no error otherwise.
 */
class OracleScorer final : public StepScorer {
 public:
  // Returns the 1-based first erroneous step, or nullopt for a clean path.
  using ErrorFn = std::function<std::optional<int>(const Problem&, const Solution&)>;

  OracleScorer();
  explicit OracleScorer(ErrorFn error_at);

  StepScoreVector score(const Problem& problem, const Solution& solution) override;

 private:
  ErrorFn error_at_;
};

class ConstantScorer final : public StepScorer {
 public:
  explicit ConstantScorer(double p);
  StepScoreVector score(const Problem& problem, const Solution& solution) override;

 private:
  double p_;
};

// Deterministic pseudo-random scores keyed by (seed, problem id, path
// content, step index) — the same path always receives the same scores.
class SeededRandomScorer final : public StepScorer {
 public:
  explicit SeededRandomScorer(std::uint64_t seed);
  StepScoreVector score(const Problem& problem, const Solution& solution) override;

 private:
  std::uint64_t seed_;
};

// Scores a path via the scorer and enforces the one-probability-per-step
// contract (ProtocolError on a count mismatch).
StepScoreVector score_path(const Problem& problem, const Solution& solution, StepScorer& scorer);

}  // namespace prmforge::scoring
