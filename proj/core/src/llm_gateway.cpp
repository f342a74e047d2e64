#include <cmath>
#include <cstdlib>
#include <thread>

#include "docforge/llm_gateway.hpp"

namespace docforge::llm {

void ModelConfig::validate() const {
  if (context_budget_chars == 0) throw InvalidArgument("llm", "context_budget_chars must be positive");
  if (max_attempts < 1) throw InvalidArgument("llm", "max_attempts must be at least 1");
  if (max_parallel < 1) throw InvalidArgument("llm", "max_parallel must be at least 1");
  if (temperature < 0.0) throw InvalidArgument("llm", "temperature must not be negative");
}

std::optional<std::string> ModelConfig::resolved_api_key() const {
  if (api_key && !api_key->empty()) return api_key;
  if (const char* env = std::getenv("DOCFORGE_LLM_KEY"); env && *env) return std::string(env);
  return std::nullopt;
}

Gateway::Gateway(std::shared_ptr<Provider> provider, ModelConfig cfg)
    : provider_(std::move(provider)), cfg_(std::move(cfg)), slots_(cfg_.max_parallel) {
  cfg_.validate();
  if (!provider_) throw InvalidArgument("llm", "gateway needs a provider");
}

RawCompletion Gateway::complete(const prompt::PromptText& prompt) {
  if (prompt.char_count > cfg_.context_budget_chars) {
    throw InvalidArgument("llm", "prompt of " + std::to_string(prompt.char_count) +
                                     " characters exceeds the context budget of " +
                                     std::to_string(cfg_.context_budget_chars) + "; not sent");
  }
  std::string last_problem;
  for (int attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
    if (attempt > 1) {
      auto delay = cfg_.backoff_base * std::pow(cfg_.backoff_factor, attempt - 2);
      std::this_thread::sleep_for(std::chrono::duration_cast<std::chrono::milliseconds>(delay));
    }
    slots_.acquire();
    int now = ++in_flight_;
    int peak = peak_in_flight_.load();
    while (now > peak && !peak_in_flight_.compare_exchange_weak(peak, now)) {
    }
    ++requests_sent_;
    try {
      auto reply = provider_->send(prompt.text, cfg_);
      --in_flight_;
      slots_.release();
      return RawCompletion{std::move(reply.text), reply.latency, attempt, cfg_.model_id};
    } catch (const RetriableError& e) {
      --in_flight_;
      slots_.release();
      last_problem = e.what();
    } catch (...) {
      --in_flight_;
      slots_.release();
      throw;
    }
  }
  throw RetriesExhaustedError("model request failed after " + std::to_string(cfg_.max_attempts) +
                                  " attempts: " + last_problem,
                              cfg_.max_attempts);
}

}  // namespace docforge::llm
