#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "docforge/groundtruth.hpp"
#include "docforge/model.hpp"
#include "docforge/promptkit.hpp"

namespace docforge::llm {

struct ModelConfig {
  std::string provider_id = "mock";
  std::string model_id = "docforge-mock-1";
  std::size_t context_budget_chars = prompt::kDefaultContextBudget;
  double temperature = 0.0;
  std::size_t max_output_chars = 16000;
  std::chrono::milliseconds request_timeout{120000};
  int max_attempts = 3;
  std::chrono::milliseconds backoff_base{1000};
  double backoff_factor = 2.0;
  /// Concurrent requests allowed through one gateway.
  int max_parallel = 5;
  /// HTTP provider endpoint and key (key falls back to DOCFORGE_LLM_KEY).
  std::string base_url;
  std::optional<std::string> api_key;

  void validate() const;
  std::optional<std::string> resolved_api_key() const;
};

struct RawCompletion {
  std::string text;
  std::chrono::milliseconds provider_latency{0};
  int attempts_used = 0;
  std::string model_id;
};

struct ProviderReply {
  std::string text;
  std::chrono::milliseconds latency{0};
};

/// A model backend. `send` performs one attempt and reports failures as
/// RetriableError (transient), AuthenticationError or QuotaError.
class Provider {
public:
  virtual ~Provider() = default;
  virtual ProviderReply send(const std::string& prompt, const ModelConfig& cfg) = 0;
};

/// Raised when every attempt failed transiently.
class RetriesExhaustedError : public TerminalError {
public:
  RetriesExhaustedError(const std::string& what, int attempts)
      : TerminalError("llm", what), attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

private:
  int attempts_;
};

/// Uniform completion entry point shared by all pipeline passes: enforces
/// the prompt budget, bounds the number of in-flight requests and retries
/// transient failures with exponential backoff.
class Gateway {
public:
  Gateway(std::shared_ptr<Provider> provider, ModelConfig cfg);

  /// Throws InvalidArgument (nothing is sent) when the prompt exceeds the
  /// budget, RetriesExhaustedError after max_attempts transient failures, and
  /// passes authentication/quota errors through.
  RawCompletion complete(const prompt::PromptText& prompt);

  const ModelConfig& config() const noexcept { return cfg_; }

  /// Test probes.
  int peak_in_flight() const noexcept { return peak_in_flight_.load(); }
  int requests_sent() const noexcept { return requests_sent_.load(); }

private:
  std::shared_ptr<Provider> provider_;
  ModelConfig cfg_;
  std::counting_semaphore<> slots_;
  std::atomic<int> in_flight_{0};
  std::atomic<int> peak_in_flight_{0};
  std::atomic<int> requests_sent_{0};
};

// ---------------------------------------------------------------------------
// Mock provider
// ---------------------------------------------------------------------------

/// Key of a canned answer: doc type plus source, or nullopt for the
/// consolidated (final) doc.
using MockKey = std::pair<DocumentationType, std::optional<DocumentationSource>>;

enum class MockFault {
  /// Prose around a cut-off JSON body on the first attempt; clean output
  /// once the repair instruction is present.
  prose_wrapped_truncated_once,
  /// Never emits JSON, repair included.
  always_garbage,
};

struct MockOptions {
  /// Wrap answers whose prompt fingerprint is divisible by 10 in prose.
  bool prose_wrapping = true;
  std::map<MockKey, MockFault> faults;
};

/// Deterministic offline provider. It recognizes the doc type and scope of
/// a prompt from its first exemplar output, and answers with the canned
/// entries for that key (empty entries for an empty context or an unknown
/// key, and for a consolidation prompt whose intermediates are all empty).
/// Output is a pure function of the prompt text.
class MockProvider : public Provider {
public:
  MockProvider(std::map<MockKey, std::vector<Json>> table, MockOptions options = {});

  /// Canned answers taken from one groundtruth directory
  /// (`<source>_<type>.json`, `final_<type>.json`).
  static std::map<MockKey, std::vector<Json>> table_from_groundtruth(const GroundtruthSet& set);

  ProviderReply send(const std::string& prompt, const ModelConfig& cfg) override;

  /// The key the mock would recover from a prompt, if any.
  static std::optional<MockKey> detect_key(std::string_view prompt);

private:
  std::map<MockKey, std::vector<Json>> table_;
  MockOptions options_;
};

/// JSON-over-HTTP provider: POST {model, prompt, temperature, max_output}
/// to cfg.base_url, expecting {"text": ...}.
class HttpProvider : public Provider {
public:
  ProviderReply send(const std::string& prompt, const ModelConfig& cfg) override;
};

}  // namespace docforge::llm
