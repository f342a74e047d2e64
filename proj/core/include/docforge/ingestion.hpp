#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "docforge/comments.hpp"
#include "docforge/model.hpp"

namespace docforge::ingest {

/// Where artifacts come from and where bundles are cached.
///
/// When `archive_dir` is set, fetches read a fixture archive instead of the
/// network: `<archive_dir>/<owner>__<name>/{pull_requests,issues,commits}.jsonl`
/// hold one hosting-platform API object per line, and `tree/` holds the
/// repository checkout used for textual files and comments.
struct IngestionConfig {
  std::string api_base_url = "https://api.github.com";
  std::optional<std::string> auth_token;  // falls back to DOCFORGE_API_TOKEN
  int max_records_per_source = 300;
  std::vector<std::string> textual_extensions = {".md", ".txt", ".rst"};
  std::vector<std::string> textual_file_names = {"README", "LICENSE", "CHANGELOG", "CONTRIBUTING"};
  std::map<std::string, std::string> comment_languages = default_comment_languages();
  std::filesystem::path cache_dir = ".docforge-cache";

  std::optional<std::filesystem::path> archive_dir;
  /// Local checkout used for textual files and comments in network mode.
  /// Without it the tree is downloaded through the contents API.
  std::optional<std::filesystem::path> local_tree;

  int page_size = 100;
  int max_attempts = 5;
  std::chrono::milliseconds backoff_base{1000};
  double backoff_factor = 2.0;
  std::chrono::milliseconds request_timeout{30000};
  bool fetch_discussions = true;

  std::function<void(std::string_view)> on_warning;

  /// Throws InvalidArgument for out-of-range settings.
  void validate() const;
  /// auth_token, or the DOCFORGE_API_TOKEN environment variable.
  std::optional<std::string> resolved_token() const;
};

/// Fetches up to max_records_per_source records of one stream, oldest first.
/// When a stream holds more records the most recent ones are kept.
///
/// Errors: RetriableError (network, rate limit; carries attempts),
/// AuthenticationError, UnknownRepositoryError.
std::vector<ArtifactRecord> fetch_artifacts(const RepositoryRef& repo, DocumentationSource source,
                                            const IngestionConfig& cfg);

/// Records for textual_files or comments from a checked-out tree.
std::vector<ArtifactRecord> records_from_tree(const std::filesystem::path& root,
                                              DocumentationSource source,
                                              const IngestionConfig& cfg);

/// Normalizes a hosting-platform pull request or issue object plus its
/// discussion comments into a record. Body is the description followed by
/// each comment as "@login: text", separated by blank lines.
ArtifactRecord record_from_discussion(const Json& item, const Json& comments,
                                      DocumentationSource source);
/// Normalizes a hosting-platform commit object. Body is the full message.
ArtifactRecord record_from_commit(const Json& item);

bool is_textual_file(std::string_view relative_path, const IngestionConfig& cfg);
/// Grammar for a path according to cfg.comment_languages, if any.
const CommentGrammar* grammar_for(std::string_view relative_path, const IngestionConfig& cfg);

/// One record as it appears in a bundle: "### <id> <title>\n<body>\n\n".
std::string render_block(const ArtifactRecord& record);

/// Sorts records and concatenates their blocks. Throws InvalidArgument
/// naming any record whose source differs from `source`.
SourceBundle build_bundle(const RepositoryRef& repo, DocumentationSource source,
                          std::vector<ArtifactRecord> records);

/// `<cache_dir>/<owner>__<name>/<source>.jsonl`
std::filesystem::path cache_path(const RepositoryRef& repo, DocumentationSource source,
                                 const IngestionConfig& cfg);

/// Atomically replaces the cache entry for the bundle's (repo, source).
std::filesystem::path cache_store(const SourceBundle& bundle, const IngestionConfig& cfg);

/// nullopt when the entry does not exist. Throws TerminalError naming the
/// file when it exists but cannot be parsed.
std::optional<SourceBundle> cache_load(const RepositoryRef& repo, DocumentationSource source,
                                       const IngestionConfig& cfg);

/// Cache first, then fetch (and store). With `offline` a missing cache entry
/// is a TerminalError instead of a fetch.
SourceBundle obtain_bundle(const RepositoryRef& repo, DocumentationSource source,
                           const IngestionConfig& cfg, bool offline);

}  // namespace docforge::ingest
