#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "docforge/groundtruth.hpp"
#include "docforge/ingestion.hpp"
#include "docforge/llm_gateway.hpp"
#include "docforge/model.hpp"
#include "docforge/promptkit.hpp"

namespace docforge::pipeline {

// ---------------------------------------------------------------------------
// JSON recovery
// ---------------------------------------------------------------------------

class ExtractionError : public Error {
public:
  ExtractionError(const std::string& what, std::vector<std::size_t> candidates)
      : Error("extract", what), candidates_(std::move(candidates)) {}
  /// Byte offsets of every balanced region that was tried and failed.
  const std::vector<std::size_t>& candidates() const noexcept { return candidates_; }

private:
  std::vector<std::size_t> candidates_;
};

using JsonFilter = std::function<bool(const Json&)>;

/// The whole text if it parses; otherwise the leftmost balanced object or
/// array that parses (and satisfies `accept`, when given), scanning left
/// to right. Throws ExtractionError when nothing qualifies.
Json extract_json(std::string_view raw, const JsonFilter& accept = {});
inline Json extract_json(const llm::RawCompletion& raw, const JsonFilter& accept = {}) {
  return extract_json(raw.text, accept);
}

/// An object carrying an "entries" array, or a non-empty array of objects.
bool is_doc_payload(const Json& value);

/// What the passes use: the leftmost object carrying an "entries" array;
/// failing that, the leftmost non-empty array of objects that is not the
/// value of a JSON key (so a nested list inside a cut-off document is not
/// mistaken for the entries). Throws ExtractionError.
Json extract_doc_payload(std::string_view raw);

/// Turns a completion into a doc of the given type and scope. Throws
/// ExtractionError or SchemaError.
StructuredDoc parse_completion(const llm::RawCompletion& raw, DocumentationType type,
                               const DocScope& scope);

// ---------------------------------------------------------------------------
// Passes
// ---------------------------------------------------------------------------

struct PipelineConfig {
  prompt::PromptConfig prompt;
  /// Source of metadata.generated_at (RFC 3339). Defaults to the wall clock.
  std::function<std::string()> clock;
  /// Order in which level-1 passes are launched.
  std::vector<DocumentationSource> launch_order{kAllDocumentationSources.begin(),
                                                kAllDocumentationSources.end()};
};

/// What one pass (level-1 source or level-2) did.
struct PassOutcome {
  StructuredDoc doc;
  int llm_calls = 0;
  int repairs = 0;
  std::chrono::milliseconds latency{0};
  std::vector<std::string> raw_texts;
};

struct PassFailure {
  std::string pass;  // source id or "final"
  std::string reason;
  std::vector<std::string> raw_texts;
  int llm_calls = 0;
};

/// A single pass failed even after its repair attempt.
class PassError : public TerminalError {
public:
  explicit PassError(PassFailure failure)
      : TerminalError("pass", "pass '" + failure.pass + "' failed: " + failure.reason),
        failure_(std::move(failure)) {}
  const PassFailure& failure() const noexcept { return failure_; }

private:
  PassFailure failure_;
};

/// One or more level-1 passes failed. Successful outputs are kept.
class Level1Error : public TerminalError {
public:
  Level1Error(std::vector<PassFailure> failures, std::map<DocumentationSource, PassOutcome> succeeded);
  const std::vector<PassFailure>& failures() const noexcept { return failures_; }
  const std::map<DocumentationSource, PassOutcome>& succeeded() const noexcept { return succeeded_; }

private:
  std::vector<PassFailure> failures_;
  std::map<DocumentationSource, PassOutcome> succeeded_;
};

/// Reissues `prompt` with the corrective instruction appended; one attempt.
/// `failed` and `problem` describe the first attempt and are kept for the
/// failure record. Throws PassError if the second completion is unusable.
PassOutcome repair_pass(const llm::RawCompletion& failed, const std::string& problem,
                        const prompt::PromptText& prompt, DocumentationType type,
                        const DocScope& scope, llm::Gateway& gateway, const PipelineConfig& cfg);

/// complete → extract → validate, with at most one repair.
PassOutcome run_pass(const prompt::PromptText& prompt, DocumentationType type, const DocScope& scope,
                     llm::Gateway& gateway, const PipelineConfig& cfg);

/// Five concurrent source passes. Throws Level1Error naming failed sources.
std::map<DocumentationSource, PassOutcome> run_level1(
    const std::map<DocumentationSource, SourceBundle>& bundles, DocumentationType type,
    const RepositoryRef& target, const GroundtruthStore& gt, llm::Gateway& gateway,
    const PipelineConfig& cfg);

/// The consolidation pass over five validated intermediates.
PassOutcome run_level2(const std::map<DocumentationSource, StructuredDoc>& intermediates,
                       DocumentationType type, const RepositoryRef& target,
                       const GroundtruthStore& gt, llm::Gateway& gateway, const PipelineConfig& cfg);

// ---------------------------------------------------------------------------
// End to end
// ---------------------------------------------------------------------------

struct PipelineRunReport {
  RepositoryRef repo;
  DocumentationType doc_type{};
  std::map<DocumentationSource, StructuredDoc> intermediates;
  StructuredDoc final_doc;
  int llm_calls = 0;
  int repairs = 0;
  /// Provider time spent per level-1 pass.
  std::map<DocumentationSource, std::chrono::milliseconds> per_pass_timings;
  std::chrono::milliseconds consolidation_timing{0};

  Json to_json() const;
};

struct DocfetchOptions {
  ingest::IngestionConfig ingestion;
  bool offline = false;
  PipelineConfig pipeline;
  /// Root of the output layout; nothing is written when empty.
  std::filesystem::path out_dir;
};

/// Obtains the five bundles, runs both levels and writes
/// `<out>/<owner>__<name>/<type>/{final.json,intermediate_<source>.json,report.json}`.
/// On a pass failure raw completions go to `<out>/debug/<owner>__<name>/<type>/`
/// before the error propagates. Errors carry a stage label.
PipelineRunReport run_docfetch(const RepositoryRef& repo, DocumentationType type,
                               const GroundtruthStore& gt, llm::Gateway& gateway,
                               const DocfetchOptions& options);

std::filesystem::path output_dir(const std::filesystem::path& out, const RepositoryRef& repo,
                                 DocumentationType type);
void write_run_outputs(const std::filesystem::path& out, const PipelineRunReport& report);

}  // namespace docforge::pipeline
