#include "prmforge/remote_scorer.hpp"

#include <cmath>

#include "prmforge/error.hpp"
#include "prmforge/io.hpp"

namespace prmforge::scoring {

using nlohmann::json;

RemoteScorer::RemoteScorer(net::HttpConfig config) : config_(std::move(config)) {
  net::validate(config_);
}

json build_scoring_body(const Problem& problem, const Solution& solution) {
  validate(problem);
  validate(solution);
  json body;
  body["question"] = problem.question;
  body["images"] = io::images_to_json(problem.images);
  body["steps"] = solution.steps;
  return body;
}

StepScoreVector RemoteScorer::score(const Problem& problem, const Solution& solution) {
  const json reply = net::post_json(config_, "", build_scoring_body(problem, solution));
  if (!reply.contains("probs") || !reply.at("probs").is_array())
    throw ProtocolError("scorer reply lacks a probs array");

  std::vector<double> probs;
  probs.reserve(reply.at("probs").size());
  for (const auto& v : reply.at("probs")) {
    if (!v.is_number()) throw ProtocolError("scorer probs must be numbers");
    const double p = v.get<double>();
    if (!std::isfinite(p) || p < 0.0 || p > 1.0)
      throw ProtocolError("scorer probability outside [0, 1]");
    probs.push_back(p);
  }
  if (probs.size() != solution.steps.size())
    throw ProtocolError("scorer returned " + std::to_string(probs.size()) +
                        " probabilities for a " + std::to_string(solution.steps.size()) +
                        "-step path");
  return StepScoreVector(std::move(probs));
}

}  // namespace prmforge::scoring
