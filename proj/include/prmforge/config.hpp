#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prmforge/types.hpp"

namespace prmforge {

enum class BackendKind { Mock, Http };

std::string to_string(BackendKind kind);
BackendKind backend_kind_from_string(const std::string& s);  // ValidationError on unknown

/**
 * Full run configuration. Values resolve with precedence
 *   command-line flags > config file > environment > built-in defaults,
 * applied by layering: construct defaults, overlay_env, overlay_file,
 * then let the CLI overwrite exactly the flags the user passed.
 */
struct RunConfig {
  // Backend selection and remote-endpoint settings.
  BackendKind backend = BackendKind::Mock;
  std::string api_base;   // env PRM_FORGE_API_BASE
  std::string api_key;    // env PRM_FORGE_API_KEY
  std::string model = "policy";
  std::string mock_script_path;  // empty → parametric mock with mock_q
  double mock_q = 0.5;
  bool send_top_k = false;

  SamplingParams sampling;  // temperature 1.0, top_k 50, top_p 0.9

  // Per-problem search settings.
  int max_search_steps = 200;
  int max_rollouts = 1000;
  int k_rollouts = 8;
  double c_puct = 0.125;

  // Run orchestration.
  int workers = 1;
  std::uint64_t seed = 0;
  std::string problems_path;
  std::string out_path;  // annotations (generate) or report (rerank); empty → stdout report

  // Reranking.
  std::vector<int> n_values = {16};
  std::vector<std::string> method_names;  // empty → all seven
  std::string candidates_path;
  std::string scorer = "oracle";  // oracle | random | constant:<p> | <scorer URL>
  bool hard_labels = false;       // generate: emit hard labels instead of soft
};

// Environment variables read by overlay_env.
inline constexpr const char* kEnvApiBase = "PRM_FORGE_API_BASE";
inline constexpr const char* kEnvApiKey = "PRM_FORGE_API_KEY";

// Overlays PRM_FORGE_API_BASE / PRM_FORGE_API_KEY when set.
RunConfig overlay_env(RunConfig base);

// Overlays every key present in a JSON config file (keys mirror the field
// names). Unknown keys → ParseError; unreadable file → IoError.
RunConfig overlay_file(RunConfig base, const std::string& path);
RunConfig overlay_json_text(RunConfig base, const std::string& text);

void validate(const RunConfig& config);

}  // namespace prmforge
