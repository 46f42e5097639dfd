#include "prmforge/http_backend.hpp"

#include "prmforge/cot.hpp"
#include "prmforge/error.hpp"

namespace prmforge {

using nlohmann::json;

namespace {

constexpr std::string_view kCompletionsSuffix = "/chat/completions";

bool ends_with(std::string_view text, std::string_view suffix) {
  return text.size() >= suffix.size() &&
         text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void validate(const HttpBackendConfig& config) {
  net::validate(config.http);
  if (config.model.empty()) throw ValidationError("backend model name must be non-empty");
}

HttpPolicyBackend::HttpPolicyBackend(HttpBackendConfig config) : config_(std::move(config)) {
  validate(config_);
  endpoint_path_ =
      ends_with(net::split_url(config_.http.base_url).path_prefix, kCompletionsSuffix)
          ? ""
          : std::string(kCompletionsSuffix);
}

json build_completion_body(const HttpBackendConfig& config, const CompletionRequest& request) {
  json content = json::array();
  content.push_back(json{{"type", "text"}, {"text", request.problem->question}});
  for (const auto& image : request.problem->images) {
    validate(image);
    const std::string url =
        !image.uri.empty() ? image.uri
                           : "data:" + image.media_type + ";base64," + image.b64;
    content.push_back(json{{"type", "image_url"}, {"image_url", json{{"url", url}}}});
  }

  json messages = json::array();
  messages.push_back(json{{"role", "user"}, {"content", std::move(content)}});
  if (!request.prefix_steps.empty())
    messages.push_back(json{{"role", "assistant"},
                            {"content", cot::render_prefix(request.prefix_steps)}});

  json body;
  body["model"] = config.model;
  body["messages"] = std::move(messages);
  body["temperature"] = request.params.temperature;
  body["top_p"] = request.params.top_p;
  body["n"] = request.n;
  body["max_tokens"] = request.params.max_tokens;
  if (config.send_top_k) body["top_k"] = request.params.top_k;
  if (request.params.seed) body["seed"] = *request.params.seed;
  return body;
}

std::vector<SampleResult> HttpPolicyBackend::complete(const CompletionRequest& request) {
  check_request(request);
  const json body = build_completion_body(config_, request);
  const json reply = net::post_json(config_.http, endpoint_path_, body);

  std::vector<SampleResult> results(static_cast<size_t>(request.n));
  for (auto& slot : results) slot.error = "missing choice";

  if (!reply.contains("choices") || !reply.at("choices").is_array())
    throw ProtocolError("completion reply lacks a choices array");
  const auto& choices = reply.at("choices");

  std::int64_t completion_approx = 0;
  for (size_t i = 0; i < choices.size() && i < results.size(); ++i) {
    const auto& choice = choices[i];
    if (choice.contains("message") && choice.at("message").contains("content") &&
        choice.at("message").at("content").is_string()) {
      results[i].text = choice.at("message").at("content").get<std::string>();
      results[i].error.clear();
      completion_approx += approx_token_count(*results[i].text);
    } else {
      results[i].error = "choice carries no text content";
    }
  }

  ledger_.record_call(request.n);
  if (reply.contains("usage") && reply.at("usage").is_object()) {
    const auto& usage = reply.at("usage");
    ledger_.record_tokens(usage.value("prompt_tokens", std::int64_t{0}),
                          usage.value("completion_tokens", std::int64_t{0}));
  } else {
    ledger_.record_tokens(approx_token_count(request.problem->question), completion_approx);
  }
  return results;
}

}  // namespace prmforge
