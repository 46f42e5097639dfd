#pragma once

#include <string>

#include "prmforge/backend.hpp"
#include "prmforge/http.hpp"

namespace prmforge {

struct HttpBackendConfig {
  net::HttpConfig http;          // base_url, api_key, retry policy
  std::string model;             // value of the "model" request field
  bool send_top_k = false;       // include top_k when the endpoint advertises it
};

void validate(const HttpBackendConfig& config);

/**
 * Chat-completion client. Each complete() call POSTs one request:
 *
 *   {"model": ..., "messages": [user question with image parts,
 *    assistant prefix when steps exist], "temperature", "top_p", "n",
 *    "max_tokens" (+ "top_k" when enabled, + "seed" when set)}
 *
 * to <base>/chat/completions (the suffix is appended unless the base URL
 * already ends with it). Image URIs pass through verbatim; base64 images
 * travel as data: URLs. The continuation of choice i lands in result
 * slot i; missing or refused choices fill their slot's error instead.
 * Reported token usage (or a whitespace approximation when absent) goes
 * to the ledger.
 */
class HttpPolicyBackend final : public PolicyBackend {
 public:
  explicit HttpPolicyBackend(HttpBackendConfig config);

  std::vector<SampleResult> complete(const CompletionRequest& request) override;

  const HttpBackendConfig& config() const { return config_; }

 private:
  HttpBackendConfig config_;
  std::string endpoint_path_;
};

// The exact JSON request body complete() would send; exposed so the wire
// format is testable without a live endpoint.
nlohmann::json build_completion_body(const HttpBackendConfig& config,
                                     const CompletionRequest& request);

}  // namespace prmforge
