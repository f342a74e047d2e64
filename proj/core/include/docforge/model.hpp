#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "docforge/error.hpp"
#include "docforge/timestamp.hpp"

namespace docforge {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Taxonomy
// ---------------------------------------------------------------------------

enum class DocumentationType { api, error_bug, file, license, project };

enum class DocumentationSource { pull_requests, issues, commits, comments, textual_files };

inline constexpr std::array<DocumentationType, 5> kAllDocumentationTypes = {
    DocumentationType::api, DocumentationType::error_bug, DocumentationType::file,
    DocumentationType::license, DocumentationType::project};

inline constexpr std::array<DocumentationSource, 5> kAllDocumentationSources = {
    DocumentationSource::pull_requests, DocumentationSource::issues,
    DocumentationSource::commits, DocumentationSource::comments,
    DocumentationSource::textual_files};

std::string_view to_string(DocumentationType type) noexcept;
std::string_view to_string(DocumentationSource source) noexcept;

std::optional<DocumentationType> parse_documentation_type(std::string_view id) noexcept;
std::optional<DocumentationSource> parse_documentation_source(std::string_view id) noexcept;

/// Row / column labels used by the score tables ("API", "Pull-Requests", ...).
std::string_view display_label(DocumentationType type) noexcept;
std::string_view display_label(DocumentationSource source) noexcept;

/// Comma separated list of every id, in enum order. Used for help text and
/// error messages so they never drift from the enums.
std::string documentation_type_ids();
std::string documentation_source_ids();

// ---------------------------------------------------------------------------
// Repository and artifact records
// ---------------------------------------------------------------------------

class RepositoryRef {
public:
  /// Throws InvalidArgument if either part is empty or contains a path
  /// separator or whitespace.
  RepositoryRef(std::string owner, std::string name);

  /// Parses "owner/name".
  static RepositoryRef parse(std::string_view display);
  /// Parses the on-disk directory form "owner__name".
  static RepositoryRef from_dir_name(std::string_view dir_name);

  const std::string& owner() const noexcept { return owner_; }
  const std::string& name() const noexcept { return name_; }

  std::string display() const { return owner_ + "/" + name_; }
  std::string dir_name() const { return owner_ + "__" + name_; }

  friend auto operator<=>(const RepositoryRef&, const RepositoryRef&) = default;

private:
  std::string owner_;
  std::string name_;
};

struct ArtifactRecord {
  DocumentationSource source{};
  std::string id;
  std::optional<std::string> title;
  std::string body;
  std::optional<Timestamp> created_at;
  std::optional<std::string> url;

  friend bool operator==(const ArtifactRecord&, const ArtifactRecord&) = default;
};

/// Throws InvalidArgument when id is empty or both title and body are empty.
void check_record(const ArtifactRecord& record);

/// Ascending by created_at (records without a timestamp first), ties by id.
bool record_order(const ArtifactRecord& a, const ArtifactRecord& b);

Json record_to_json(const ArtifactRecord& record);
ArtifactRecord record_from_json(const Json& j);

struct SourceBundle {
  RepositoryRef repo;
  DocumentationSource source{};
  std::vector<ArtifactRecord> records;
  std::string extracted_text;

  friend bool operator==(const SourceBundle&, const SourceBundle&) = default;
};

// ---------------------------------------------------------------------------
// Structured documentation
// ---------------------------------------------------------------------------

/// Either a single documentation source (level 1 / intermediate) or all
/// sources (level 2 / final).
class DocScope {
public:
  static DocScope single(DocumentationSource source) { return DocScope{source}; }
  static DocScope all_sources() { return DocScope{std::nullopt}; }

  bool is_all_sources() const noexcept { return !source_.has_value(); }
  /// Precondition: !is_all_sources().
  DocumentationSource source() const { return *source_; }

  friend bool operator==(const DocScope&, const DocScope&) = default;

private:
  explicit DocScope(std::optional<DocumentationSource> s) : source_(s) {}
  std::optional<DocumentationSource> source_;
};

struct DocMetadata {
  std::string generated_at;
  std::string model_id;
  std::string prompt_fingerprint;
  bool truncated = false;

  friend bool operator==(const DocMetadata&, const DocMetadata&) = default;
};

struct StructuredDoc {
  DocumentationType doc_type{};
  DocScope scope = DocScope::all_sources();
  std::vector<Json> entries;
  DocMetadata metadata;

  friend bool operator==(const StructuredDoc&, const StructuredDoc&) = default;
};

inline constexpr int kSchemaVersion = 1;

/// On-disk form: {"schema_version", "doc_type", "scope", "entries", "metadata"}.
Json doc_to_json(const StructuredDoc& doc);
/// Inverse of doc_to_json. `metadata` and `schema_version` may be omitted.
/// Throws InvalidArgument on structural problems (not schema violations).
StructuredDoc doc_from_json(const Json& j);

/// The JSON shown to a model as an exemplar output: doc_type, scope and
/// entries, serialized compactly with sorted keys.
std::string exemplar_json(const StructuredDoc& doc);

// ---------------------------------------------------------------------------
// Entry schemas
// ---------------------------------------------------------------------------

enum class FieldKind { string, string_list, object_list, enumeration };

struct FieldSpec {
  std::string_view name;
  FieldKind kind;
  bool required;
  std::vector<FieldSpec> children = {};       // object_list only
  std::vector<std::string_view> allowed = {}; // enumeration only
};

/// Field list of one entry of the given type, in declared order.
const std::vector<FieldSpec>& entry_schema(DocumentationType type);

struct SchemaViolation {
  std::size_t entry_index;
  std::string field;
  std::string message;

  friend bool operator==(const SchemaViolation&, const SchemaViolation&) = default;
};

struct ValidationResult {
  std::vector<SchemaViolation> violations;

  bool ok() const noexcept { return violations.empty(); }
  std::string summary() const;
};

ValidationResult validate_schema(const StructuredDoc& doc);

class SchemaError : public InvalidArgument {
public:
  SchemaError(const std::string& what, ValidationResult result)
      : InvalidArgument("schema", what), result_(std::move(result)) {}
  const ValidationResult& result() const noexcept { return result_; }

private:
  ValidationResult result_;
};

/// Deterministic "key: value" flattening of a doc's entries, used as the
/// input of the text metrics. Throws SchemaError for invalid docs.
std::string canonical_text(const StructuredDoc& doc);

// ---------------------------------------------------------------------------
// Scores
// ---------------------------------------------------------------------------

struct EvalScores {
  double bleu4 = 0.0;
  double rouge_p = 0.0;
  double rouge_r = 0.0;
  double rouge_f = 0.0;
};

/// Harmonic mean, 0 when both inputs are 0.
double f1_score(double precision, double recall) noexcept;

}  // namespace docforge
