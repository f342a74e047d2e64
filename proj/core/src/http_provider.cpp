#include <httplib.h>

#include "docforge/llm_gateway.hpp"

namespace docforge::llm {

ProviderReply HttpProvider::send(const std::string& prompt, const ModelConfig& cfg) {
  const auto& url = cfg.base_url;
  auto scheme_end = url.find("://");
  if (url.empty() || scheme_end == std::string::npos) {
    throw InvalidArgument("llm", "http provider needs a base URL with a scheme, got '" + url + "'");
  }
  auto path_start = url.find('/', scheme_end + 3);
  std::string host = url.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  Json request = {
      {"model", cfg.model_id},
      {"prompt", prompt},
      {"temperature", cfg.temperature},
      {"max_output", cfg.max_output_chars},
  };
  httplib::Headers headers = {{"User-Agent", "docforge"}};
  if (auto key = cfg.resolved_api_key()) headers.emplace("Authorization", "Bearer " + *key);

  httplib::Client client(host);
  auto timeout = std::chrono::duration_cast<std::chrono::seconds>(cfg.request_timeout);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);

  auto started = std::chrono::steady_clock::now();
  auto result = client.Post(path, headers, request.dump(), "application/json");
  auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
  if (!result) {
    throw RetriableError("llm", "network failure: " + httplib::to_string(result.error()), 1);
  }
  const int status = result->status;
  const std::string status_text = "HTTP " + std::to_string(status);
  if (status == 401 || status == 403) {
    throw AuthenticationError("llm", "model provider rejected the credentials (" + status_text + ")");
  }
  if (status == 402 || (status == 429 && result->body.find("quota") != std::string::npos)) {
    throw QuotaError("llm", "model provider quota exhausted (" + status_text + ")");
  }
  if (status == 429 || status == 408 || status >= 500) {
    throw RetriableError("llm", "model provider unavailable (" + status_text + ")", 1);
  }
  if (status < 200 || status >= 300) {
    throw TerminalError("llm", "model provider returned " + status_text + ": " + result->body);
  }
  Json reply = Json::parse(result->body, nullptr, false);
  if (reply.is_discarded() || !reply.is_object() || !reply.contains("text") || !reply["text"].is_string()) {
    throw TerminalError("llm", "model provider reply lacks a \"text\" string");
  }
  return {reply["text"].get<std::string>(), latency};
}

}  // namespace docforge::llm
