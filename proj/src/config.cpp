#include "prmforge/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "prmforge/error.hpp"

namespace prmforge {

using nlohmann::json;

std::string to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::Mock:
      return "mock";
    case BackendKind::Http:
      return "http";
  }
  throw ValidationError("unknown backend kind");
}

BackendKind backend_kind_from_string(const std::string& s) {
  if (s == "mock") return BackendKind::Mock;
  if (s == "http") return BackendKind::Http;
  throw ValidationError("unknown backend kind: '" + s + "' (expected mock or http)");
}

RunConfig overlay_env(RunConfig base) {
  if (const char* v = std::getenv(kEnvApiBase); v != nullptr && *v != '\0') base.api_base = v;
  if (const char* v = std::getenv(kEnvApiKey); v != nullptr && *v != '\0') base.api_key = v;
  return base;
}

RunConfig overlay_json_text(RunConfig base, const std::string& text) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object())
    throw ParseError("config file must hold one JSON object");

  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "backend")
        base.backend = backend_kind_from_string(value.get<std::string>());
      else if (key == "api_base")
        base.api_base = value.get<std::string>();
      else if (key == "api_key")
        base.api_key = value.get<std::string>();
      else if (key == "model")
        base.model = value.get<std::string>();
      else if (key == "mock_script_path")
        base.mock_script_path = value.get<std::string>();
      else if (key == "mock_q")
        base.mock_q = value.get<double>();
      else if (key == "send_top_k")
        base.send_top_k = value.get<bool>();
      else if (key == "temperature")
        base.sampling.temperature = value.get<double>();
      else if (key == "top_k")
        base.sampling.top_k = value.get<int>();
      else if (key == "top_p")
        base.sampling.top_p = value.get<double>();
      else if (key == "max_tokens")
        base.sampling.max_tokens = value.get<int>();
      else if (key == "max_search_steps")
        base.max_search_steps = value.get<int>();
      else if (key == "max_rollouts")
        base.max_rollouts = value.get<int>();
      else if (key == "k_rollouts")
        base.k_rollouts = value.get<int>();
      else if (key == "c_puct")
        base.c_puct = value.get<double>();
      else if (key == "workers")
        base.workers = value.get<int>();
      else if (key == "seed")
        base.seed = value.get<std::uint64_t>();
      else if (key == "problems_path")
        base.problems_path = value.get<std::string>();
      else if (key == "out_path")
        base.out_path = value.get<std::string>();
      else if (key == "n_values")
        base.n_values = value.get<std::vector<int>>();
      else if (key == "methods")
        base.method_names = value.get<std::vector<std::string>>();
      else if (key == "candidates_path")
        base.candidates_path = value.get<std::string>();
      else if (key == "scorer")
        base.scorer = value.get<std::string>();
      else if (key == "hard_labels")
        base.hard_labels = value.get<bool>();
      else
        throw ParseError("unknown config key: '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad config value: ") + e.what());
  }
  return base;
}

RunConfig overlay_file(RunConfig base, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return overlay_json_text(std::move(base), text.str());
}

void validate(const RunConfig& config) {
  prmforge::validate(config.sampling);
  if (config.max_search_steps < 1) throw ValidationError("max_search_steps must be positive");
  if (config.max_rollouts < 1) throw ValidationError("max_rollouts must be positive");
  if (config.k_rollouts < 1) throw ValidationError("k_rollouts must be positive");
  if (!(config.c_puct >= 0.0)) throw ValidationError("c_puct must be nonnegative");
  if (config.workers < 1) throw ValidationError("workers must be positive");
  if (!(config.mock_q >= 0.0 && config.mock_q <= 1.0))
    throw ValidationError("mock_q must lie in [0, 1]");
  if (config.n_values.empty()) throw ValidationError("at least one n value is required");
  for (int n : config.n_values)
    if (n < 1) throw ValidationError("n values must be positive");
  if (config.backend == BackendKind::Http && config.api_base.empty())
    throw ValidationError("the http backend needs an api_base (flag, config, or " +
                          std::string(kEnvApiBase) + ")");
}

}  // namespace prmforge
