#include "docforge/model.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace docforge {

namespace {

constexpr std::array<std::string_view, 5> kTypeIds = {"api", "error", "file", "license",
                                                      "project"};
constexpr std::array<std::string_view, 5> kTypeLabels = {"API", "Error", "File", "License",
                                                         "Project"};
constexpr std::array<std::string_view, 5> kSourceIds = {"pull_requests", "issues", "commits",
                                                        "comments", "textual_files"};
constexpr std::array<std::string_view, 5> kSourceLabels = {
    "Pull-Requests", "Issues", "Commits", "Comments", "TextualFiles"};

std::string join_ids(const std::array<std::string_view, 5>& ids) {
  std::string out;
  for (auto id : ids) {
    if (!out.empty()) out += ", ";
    out += id;
  }
  return out;
}

bool valid_repo_part(std::string_view part) {
  if (part.empty() || part == "." || part == "..") return false;
  return std::none_of(part.begin(), part.end(), [](unsigned char c) {
    return c == '/' || c == '\\' || std::isspace(c) || c < 0x20;
  });
}

}  // namespace

std::string_view to_string(DocumentationType type) noexcept {
  return kTypeIds[static_cast<std::size_t>(type)];
}

std::string_view to_string(DocumentationSource source) noexcept {
  return kSourceIds[static_cast<std::size_t>(source)];
}

std::optional<DocumentationType> parse_documentation_type(std::string_view id) noexcept {
  for (std::size_t i = 0; i < kTypeIds.size(); ++i) {
    if (kTypeIds[i] == id) return static_cast<DocumentationType>(i);
  }
  return std::nullopt;
}

std::optional<DocumentationSource> parse_documentation_source(std::string_view id) noexcept {
  for (std::size_t i = 0; i < kSourceIds.size(); ++i) {
    if (kSourceIds[i] == id) return static_cast<DocumentationSource>(i);
  }
  return std::nullopt;
}

std::string_view display_label(DocumentationType type) noexcept {
  return kTypeLabels[static_cast<std::size_t>(type)];
}

std::string_view display_label(DocumentationSource source) noexcept {
  return kSourceLabels[static_cast<std::size_t>(source)];
}

std::string documentation_type_ids() { return join_ids(kTypeIds); }
std::string documentation_source_ids() { return join_ids(kSourceIds); }

// ---------------------------------------------------------------------------

RepositoryRef::RepositoryRef(std::string owner, std::string name)
    : owner_(std::move(owner)), name_(std::move(name)) {
  if (!valid_repo_part(owner_) || !valid_repo_part(name_)) {
    throw InvalidArgument("model", "invalid repository reference '" + owner_ + "/" + name_ +
                                       "': expected owner/name without whitespace or separators");
  }
}

RepositoryRef RepositoryRef::parse(std::string_view display) {
  auto slash = display.find('/');
  if (slash == std::string_view::npos) {
    throw InvalidArgument("model", "repository must be given as owner/name, got '" +
                                       std::string(display) + "'");
  }
  return RepositoryRef(std::string(display.substr(0, slash)),
                       std::string(display.substr(slash + 1)));
}

RepositoryRef RepositoryRef::from_dir_name(std::string_view dir_name) {
  auto sep = dir_name.find("__");
  if (sep == std::string_view::npos) {
    throw InvalidArgument("model", "repository directory must be named owner__name, got '" +
                                       std::string(dir_name) + "'");
  }
  return RepositoryRef(std::string(dir_name.substr(0, sep)),
                       std::string(dir_name.substr(sep + 2)));
}

// ---------------------------------------------------------------------------

void check_record(const ArtifactRecord& record) {
  if (record.id.empty()) throw InvalidArgument("model", "artifact record with empty id");
  if (record.body.empty() && (!record.title || record.title->empty())) {
    throw InvalidArgument("model", "artifact record '" + record.id + "' has neither title nor body");
  }
}

bool record_order(const ArtifactRecord& a, const ArtifactRecord& b) {
  if (a.created_at != b.created_at) {
    if (!a.created_at) return true;
    if (!b.created_at) return false;
    return *a.created_at < *b.created_at;
  }
  return a.id < b.id;
}

Json record_to_json(const ArtifactRecord& record) {
  Json j;
  j["source"] = to_string(record.source);
  j["id"] = record.id;
  j["title"] = record.title ? Json(*record.title) : Json(nullptr);
  j["body"] = record.body;
  j["created_at"] = record.created_at ? Json(format_rfc3339(*record.created_at)) : Json(nullptr);
  j["url"] = record.url ? Json(*record.url) : Json(nullptr);
  return j;
}

ArtifactRecord record_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("model", "artifact record must be a JSON object");
  ArtifactRecord r;
  auto source = parse_documentation_source(j.value("source", std::string{}));
  if (!source) throw InvalidArgument("model", "artifact record with unknown source");
  r.source = *source;
  r.id = j.at("id").get<std::string>();
  r.body = j.value("body", std::string{});
  if (auto it = j.find("title"); it != j.end() && it->is_string()) r.title = it->get<std::string>();
  if (auto it = j.find("url"); it != j.end() && it->is_string()) r.url = it->get<std::string>();
  if (auto it = j.find("created_at"); it != j.end() && it->is_string()) {
    r.created_at = parse_rfc3339(it->get<std::string>());
    if (!r.created_at) {
      throw InvalidArgument("model", "artifact record '" + r.id + "' has a malformed created_at");
    }
  }
  check_record(r);
  return r;
}

// ---------------------------------------------------------------------------

namespace {

Json scope_to_json(const DocScope& scope) {
  if (scope.is_all_sources()) return Json{{"kind", "all_sources"}};
  return Json{{"kind", "single_source"}, {"source", to_string(scope.source())}};
}

DocScope scope_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("model", "doc scope must be an object");
  auto kind = j.value("kind", std::string{});
  if (kind == "all_sources") return DocScope::all_sources();
  if (kind == "single_source") {
    auto source = parse_documentation_source(j.value("source", std::string{}));
    if (!source) throw InvalidArgument("model", "single_source scope with unknown source");
    return DocScope::single(*source);
  }
  throw InvalidArgument("model", "unknown doc scope kind '" + kind + "'");
}

}  // namespace

Json doc_to_json(const StructuredDoc& doc) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["doc_type"] = to_string(doc.doc_type);
  j["scope"] = scope_to_json(doc.scope);
  j["entries"] = Json(doc.entries);
  j["metadata"] = {
      {"generated_at", doc.metadata.generated_at},
      {"model_id", doc.metadata.model_id},
      {"prompt_fingerprint", doc.metadata.prompt_fingerprint},
      {"truncated", doc.metadata.truncated},
  };
  return j;
}

StructuredDoc doc_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("model", "structured doc must be a JSON object");
  if (auto it = j.find("schema_version"); it != j.end() && *it != kSchemaVersion) {
    throw InvalidArgument("model", "unsupported schema_version " + it->dump());
  }
  StructuredDoc doc;
  auto type = parse_documentation_type(j.value("doc_type", std::string{}));
  if (!type) throw InvalidArgument("model", "structured doc with unknown doc_type");
  doc.doc_type = *type;
  doc.scope = scope_from_json(j.at("scope"));
  const auto& entries = j.at("entries");
  if (!entries.is_array()) throw InvalidArgument("model", "structured doc entries must be an array");
  doc.entries.assign(entries.begin(), entries.end());
  if (auto it = j.find("metadata"); it != j.end() && it->is_object()) {
    doc.metadata.generated_at = it->value("generated_at", std::string{});
    doc.metadata.model_id = it->value("model_id", std::string{});
    doc.metadata.prompt_fingerprint = it->value("prompt_fingerprint", std::string{});
    doc.metadata.truncated = it->value("truncated", false);
  }
  return doc;
}

std::string exemplar_json(const StructuredDoc& doc) {
  Json j;
  j["doc_type"] = to_string(doc.doc_type);
  j["scope"] = scope_to_json(doc.scope);
  j["entries"] = Json(doc.entries);
  return j.dump();
}

// ---------------------------------------------------------------------------
// Schemas
// ---------------------------------------------------------------------------

const std::vector<FieldSpec>& entry_schema(DocumentationType type) {
  static const std::vector<FieldSpec> api = {
      {"name", FieldKind::string, true},
      {"description", FieldKind::string, true},
      {"members",
       FieldKind::object_list,
       false,
       {{"name", FieldKind::string, true},
        {"kind", FieldKind::string, true},
        {"description", FieldKind::string, false}}},
      {"source_refs", FieldKind::string_list, false},
  };
  static const std::vector<FieldSpec> error = {
      {"summary", FieldKind::string, true},
      {"cause", FieldKind::string, false},
      {"resolution", FieldKind::string, false},
      {"status", FieldKind::string, false},
      {"source_refs", FieldKind::string_list, false},
  };
  static const std::vector<FieldSpec> file = {
      {"path", FieldKind::string, true},
      {"change", FieldKind::string, true},
      {"description", FieldKind::string, true},
      {"dependencies", FieldKind::string_list, false},
      {"source_refs", FieldKind::string_list, false},
  };
  static const std::vector<FieldSpec> license = {
      {"license_name", FieldKind::string, true},
      {"permissions", FieldKind::string_list, false},
      {"scope", FieldKind::string, false},
      {"source_refs", FieldKind::string_list, false},
  };
  static const std::vector<FieldSpec> project = {
      {"category",
       FieldKind::enumeration,
       true,
       {},
       {"setup", "usage", "contribution", "environment", "update", "other"}},
      {"description", FieldKind::string, true},
      {"source_refs", FieldKind::string_list, false},
  };
  switch (type) {
    case DocumentationType::api: return api;
    case DocumentationType::error_bug: return error;
    case DocumentationType::file: return file;
    case DocumentationType::license: return license;
    case DocumentationType::project: return project;
  }
  return api;
}

namespace {

void validate_object(const Json& object, const std::vector<FieldSpec>& schema,
                     std::size_t entry_index, const std::string& prefix,
                     std::vector<SchemaViolation>& out) {
  for (const auto& field : schema) {
    std::string path = prefix + std::string(field.name);
    auto it = object.find(field.name);
    if (it == object.end() || it->is_null()) {
      if (field.required) out.push_back({entry_index, path, "missing required field"});
      continue;
    }
    const Json& value = *it;
    switch (field.kind) {
      case FieldKind::string:
        if (!value.is_string()) out.push_back({entry_index, path, "expected a string"});
        break;
      case FieldKind::enumeration: {
        if (!value.is_string()) {
          out.push_back({entry_index, path, "expected a string"});
          break;
        }
        auto s = value.get<std::string>();
        if (std::find(field.allowed.begin(), field.allowed.end(), s) == field.allowed.end()) {
          out.push_back({entry_index, path, "value '" + s + "' is not an allowed choice"});
        }
        break;
      }
      case FieldKind::string_list:
        if (!value.is_array()) {
          out.push_back({entry_index, path, "expected a list of strings"});
          break;
        }
        for (std::size_t i = 0; i < value.size(); ++i) {
          if (!value[i].is_string()) {
            out.push_back({entry_index, path + "[" + std::to_string(i) + "]", "expected a string"});
          }
        }
        break;
      case FieldKind::object_list:
        if (!value.is_array()) {
          out.push_back({entry_index, path, "expected a list of objects"});
          break;
        }
        for (std::size_t i = 0; i < value.size(); ++i) {
          std::string item = path + "[" + std::to_string(i) + "]";
          if (!value[i].is_object()) {
            out.push_back({entry_index, item, "expected an object"});
            continue;
          }
          validate_object(value[i], field.children, entry_index, item + ".", out);
        }
        break;
    }
  }
}

}  // namespace

std::string ValidationResult::summary() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += "entry " + std::to_string(v.entry_index) + " field '" + v.field + "': " + v.message;
  }
  return out;
}

ValidationResult validate_schema(const StructuredDoc& doc) {
  ValidationResult result;
  const auto& schema = entry_schema(doc.doc_type);
  for (std::size_t i = 0; i < doc.entries.size(); ++i) {
    if (!doc.entries[i].is_object()) {
      result.violations.push_back({i, "", "entry is not an object"});
      continue;
    }
    validate_object(doc.entries[i], schema, i, "", result.violations);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Canonical text
// ---------------------------------------------------------------------------

namespace {

void append_escaped(std::string& out, std::string_view value) {
  for (char c : value) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
}

void append_line(std::string& out, std::string_view key, std::string_view value) {
  out += key;
  out += ": ";
  append_escaped(out, value);
  out += '\n';
}

// Fields outside the schema are kept so no model output is silently lost,
// after the schema fields and in key order.
void flatten_extra(std::string& out, std::string_view key, const Json& value) {
  if (value.is_null()) return;
  if (value.is_string()) {
    append_line(out, key, value.get_ref<const std::string&>());
  } else if (value.is_array()) {
    for (const auto& item : value) flatten_extra(out, key, item);
  } else if (value.is_object()) {
    for (const auto& [k, v] : value.items()) flatten_extra(out, k, v);
  } else {
    append_line(out, key, value.dump());
  }
}

void flatten_object(std::string& out, const Json& object, const std::vector<FieldSpec>& schema) {
  std::set<std::string_view> known;
  for (const auto& field : schema) {
    known.insert(field.name);
    auto it = object.find(field.name);
    if (it == object.end() || it->is_null()) continue;
    switch (field.kind) {
      case FieldKind::string:
      case FieldKind::enumeration:
        append_line(out, field.name, it->get_ref<const std::string&>());
        break;
      case FieldKind::string_list:
        for (const auto& item : *it) append_line(out, field.name, item.get_ref<const std::string&>());
        break;
      case FieldKind::object_list:
        for (const auto& item : *it) flatten_object(out, item, field.children);
        break;
    }
  }
  for (const auto& [key, value] : object.items()) {
    if (!known.count(key)) flatten_extra(out, key, value);
  }
}

}  // namespace

std::string canonical_text(const StructuredDoc& doc) {
  auto result = validate_schema(doc);
  if (!result.ok()) {
    throw SchemaError("cannot flatten an invalid " + std::string(to_string(doc.doc_type)) +
                          " doc: " + result.summary(),
                      std::move(result));
  }
  std::string out;
  const auto& schema = entry_schema(doc.doc_type);
  for (const auto& entry : doc.entries) flatten_object(out, entry, schema);
  return out;
}

double f1_score(double precision, double recall) noexcept {
  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace docforge
