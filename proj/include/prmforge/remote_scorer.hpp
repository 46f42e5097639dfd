#pragma once

#include "prmforge/http.hpp"
#include "prmforge/scoring.hpp"

namespace prmforge::scoring {

/**
 * Client for a step-scoring service. Each path is scored with one POST to
 * the configured URL:
 *
 *   {"question": ..., "images": [...], "steps": [...]}  →  {"probs": [...]}
 *
 * The service reads one probability per step at its marker position; a
 * reply whose probs count differs from the step count, or carries values
 * outside [0, 1], is a ProtocolError. Transport failures follow the
 * shared retry policy and surface as TransportError.
 */
class RemoteScorer final : public StepScorer {
 public:
  explicit RemoteScorer(net::HttpConfig config);

  StepScoreVector score(const Problem& problem, const Solution& solution) override;

  const net::HttpConfig& config() const { return config_; }

 private:
  net::HttpConfig config_;
};

// The exact JSON request body score() sends; exposed for wire-format tests.
nlohmann::json build_scoring_body(const Problem& problem, const Solution& solution);

}  // namespace prmforge::scoring
