#include "prmforge/http.hpp"

#include <chrono>
#include <thread>

#include <httplib.h>

#include "prmforge/error.hpp"

namespace prmforge::net {

using nlohmann::json;

void validate(const HttpConfig& config) {
  split_url(config.base_url);
  if (config.max_retries < 0) throw ValidationError("max_retries must be nonnegative");
  if (config.connect_timeout_ms < 1 || config.read_timeout_ms < 1)
    throw ValidationError("timeouts must be positive");
  if (config.backoff_initial_ms < 0) throw ValidationError("backoff must be nonnegative");
}

SplitUrl split_url(const std::string& base_url) {
  const auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos)
    throw ValidationError("base URL needs a scheme: '" + base_url + "'");
  const auto host_start = scheme_end + 3;
  const auto path_start = base_url.find('/', host_start);
  SplitUrl out;
  if (path_start == std::string::npos) {
    out.origin = base_url;
  } else {
    out.origin = base_url.substr(0, path_start);
    out.path_prefix = base_url.substr(path_start);
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/')
      out.path_prefix.pop_back();
  }
  if (out.origin.size() <= host_start)
    throw ValidationError("base URL needs a host: '" + base_url + "'");
  return out;
}

namespace {

bool retryable_status(int status) {
  return status == 429 || (status >= 500 && status < 600);
}

}  // namespace

json post_json(const HttpConfig& config, const std::string& path, const json& body) {
  validate(config);
  const SplitUrl url = split_url(config.base_url);
  const std::string full_path = url.path_prefix + path;
  const std::string payload = body.dump();

  httplib::Client client(url.origin);
  client.set_connection_timeout(std::chrono::milliseconds(config.connect_timeout_ms));
  client.set_read_timeout(std::chrono::milliseconds(config.read_timeout_ms));

  httplib::Headers headers;
  if (!config.api_key.empty())
    headers.emplace("Authorization", "Bearer " + config.api_key);

  std::string last_failure;
  int backoff_ms = config.backoff_initial_ms;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (attempt > 0 && backoff_ms > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms *= 2;
    }

    httplib::Result result = client.Post(full_path, headers, payload, "application/json");
    if (!result) {
      last_failure = "transport failure: " + httplib::to_string(result.error());
      continue;
    }
    if (result->status == 401 || result->status == 403)
      throw AuthError("endpoint rejected credentials (HTTP " +
                      std::to_string(result->status) + ")");
    if (retryable_status(result->status)) {
      last_failure = "HTTP " + std::to_string(result->status);
      continue;
    }
    if (result->status < 200 || result->status >= 300)
      throw ProtocolError("unexpected HTTP " + std::to_string(result->status) + ": " +
                          result->body.substr(0, 200));

    json reply = json::parse(result->body, nullptr, /*allow_exceptions=*/false);
    if (reply.is_discarded())
      throw ProtocolError("endpoint returned a non-JSON body");
    return reply;
  }
  throw TransportError(last_failure + " after " + std::to_string(config.max_retries + 1) +
                       " attempts to " + url.origin + full_path);
}

}  // namespace prmforge::net
