#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace prmforge::net {

struct HttpConfig {
  std::string base_url;          // scheme://host[:port][/path-prefix]
  std::string api_key;           // sent as "Authorization: Bearer <key>" when non-empty
  int max_retries = 3;           // additional attempts after the first
  int connect_timeout_ms = 5000;
  int read_timeout_ms = 120000;
  int backoff_initial_ms = 200;  // doubles after each retried attempt
};

void validate(const HttpConfig& config);

struct SplitUrl {
  std::string origin;       // scheme://host[:port], what the client connects to
  std::string path_prefix;  // leading path from the base URL, no trailing slash
};

// Splits a base URL into connection origin and path prefix.
// Throws ValidationError when the URL has no scheme or no host.
SplitUrl split_url(const std::string& base_url);

/**
 * POSTs `body` as application/json to the base URL's prefix + `path` and
 * returns the parsed JSON reply.
 *
 * Transport failures and 429/5xx statuses are retried with exponential
 * backoff up to max_retries; when they persist the last failure surfaces
 * as TransportError. Credential rejections (401/403) throw AuthError
 * immediately, any other non-2xx status or an unparseable reply body
 * throws ProtocolError.
 */
nlohmann::json post_json(const HttpConfig& config, const std::string& path,
                         const nlohmann::json& body);

}  // namespace prmforge::net
