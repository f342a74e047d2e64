#include "docforge/ingestion.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>

#include "docforge/groundtruth.hpp"
#include "hosting_api.hpp"

namespace docforge::ingest {

namespace fs = std::filesystem;

void IngestionConfig::validate() const {
  if (max_records_per_source < 1) {
    throw InvalidArgument("ingestion", "max_records_per_source must be at least 1");
  }
  if (textual_extensions.empty()) {
    throw InvalidArgument("ingestion", "textual_extensions must not be empty");
  }
  if (page_size < 1 || page_size > 100) {
    throw InvalidArgument("ingestion", "page_size must be within 1..100");
  }
  if (max_attempts < 1) throw InvalidArgument("ingestion", "max_attempts must be at least 1");
  for (const auto& [suffix, grammar] : comment_languages) {
    if (!has_builtin_grammar(grammar)) {
      throw InvalidArgument("ingestion", "suffix " + suffix + " maps to unknown grammar " + grammar);
    }
  }
}

std::optional<std::string> IngestionConfig::resolved_token() const {
  if (auth_token && !auth_token->empty()) return auth_token;
  if (const char* env = std::getenv("DOCFORGE_API_TOKEN"); env && *env) return std::string(env);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Normalization of platform objects
// ---------------------------------------------------------------------------

namespace {

std::string string_field(const Json& j, const char* key) {
  auto it = j.find(key);
  return (it != j.end() && it->is_string()) ? it->get<std::string>() : std::string{};
}

std::optional<Timestamp> time_field(const Json& j, const char* key) {
  auto text = string_field(j, key);
  if (text.empty()) return std::nullopt;
  return parse_rfc3339(text);
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

ArtifactRecord record_from_discussion(const Json& item, const Json& comments,
                                      DocumentationSource source) {
  ArtifactRecord r;
  r.source = source;
  if (auto it = item.find("number"); it != item.end() && it->is_number_integer()) {
    r.id = std::to_string(it->get<long long>());
  } else {
    r.id = string_field(item, "id");
  }
  auto title = string_field(item, "title");
  if (!title.empty()) r.title = title;
  r.body = string_field(item, "body");
  if (comments.is_array()) {
    for (const auto& c : comments) {
      auto text = string_field(c, "body");
      if (text.empty()) continue;
      std::string login;
      if (auto user = c.find("user"); user != c.end() && user->is_object()) {
        login = string_field(*user, "login");
      }
      if (!r.body.empty()) r.body += "\n\n";
      r.body += "@" + (login.empty() ? std::string("unknown") : login) + ": " + text;
    }
  }
  r.created_at = time_field(item, "created_at");
  auto url = string_field(item, "html_url");
  if (!url.empty()) r.url = url;
  if (r.body.empty() && !r.title) r.title = "(untitled)";
  check_record(r);
  return r;
}

ArtifactRecord record_from_commit(const Json& item) {
  ArtifactRecord r;
  r.source = DocumentationSource::commits;
  r.id = string_field(item, "sha");
  Json commit = item.value("commit", Json::object());
  r.body = string_field(commit, "message");
  if (auto author = commit.find("author"); author != commit.end() && author->is_object()) {
    r.created_at = time_field(*author, "date");
  }
  if (!r.created_at) {
    if (auto committer = commit.find("committer"); committer != commit.end() && committer->is_object()) {
      r.created_at = time_field(*committer, "date");
    }
  }
  auto url = string_field(item, "html_url");
  if (!url.empty()) r.url = url;
  if (r.body.empty()) r.title = "(empty commit message)";
  check_record(r);
  return r;
}

bool is_textual_file(std::string_view relative_path, const IngestionConfig& cfg) {
  auto name = fs::path(std::string(relative_path)).filename().string();
  auto lname = lower(name);
  for (const auto& ext : cfg.textual_extensions) {
    auto lext = lower(ext);
    if (lname.size() > lext.size() && lname.compare(lname.size() - lext.size(), lext.size(), lext) == 0) {
      return true;
    }
  }
  if (name.find('.') == std::string::npos) {
    for (const auto& n : cfg.textual_file_names) {
      if (lower(n) == lname) return true;
    }
  }
  return false;
}

const CommentGrammar* grammar_for(std::string_view relative_path, const IngestionConfig& cfg) {
  auto ext = lower(fs::path(std::string(relative_path)).extension().string());
  auto it = cfg.comment_languages.find(ext);
  if (it == cfg.comment_languages.end()) return nullptr;
  return &builtin_grammar(it->second);
}

namespace {

std::string comment_record_id(std::string_view path, std::size_t line) {
  // Zero padding keeps comments of one file in line order under id sorting.
  std::string number = std::to_string(line);
  if (number.size() < 6) number.insert(0, 6 - number.size(), '0');
  return std::string(path) + ":" + number;
}

void warn(const IngestionConfig& cfg, const std::string& message) {
  if (cfg.on_warning) cfg.on_warning(message);
}

// Appends comment records of one file.
void add_comment_records(std::string_view path, std::string_view content, const CommentGrammar& grammar,
                         const IngestionConfig& cfg, std::vector<ArtifactRecord>& out) {
  auto extraction = extract_comments(content, grammar);
  for (const auto& w : extraction.warnings) warn(cfg, std::string(path) + ": " + w);
  for (const auto& comment : extraction.comments) {
    if (comment.text.empty()) continue;
    ArtifactRecord r;
    r.source = DocumentationSource::comments;
    r.id = comment_record_id(path, comment.line);
    r.body = comment.text;
    out.push_back(std::move(r));
  }
}

// Keeps the `limit` most recent records, ascending.
std::vector<ArtifactRecord> keep_most_recent(std::vector<ArtifactRecord> records, int limit) {
  std::sort(records.begin(), records.end(), record_order);
  auto n = static_cast<std::size_t>(limit);
  if (records.size() > n) records.erase(records.begin(), records.end() - static_cast<std::ptrdiff_t>(n));
  return records;
}

// Keeps the first `limit` records in id order (tree sources carry no dates).
std::vector<ArtifactRecord> keep_first(std::vector<ArtifactRecord> records, int limit) {
  std::sort(records.begin(), records.end(), record_order);
  auto n = static_cast<std::size_t>(limit);
  if (records.size() > n) records.resize(n);
  return records;
}

bool is_tree_source(DocumentationSource source) {
  return source == DocumentationSource::comments || source == DocumentationSource::textual_files;
}

std::vector<Json> read_jsonl(const fs::path& path) {
  std::vector<Json> items;
  if (!fs::exists(path)) return items;
  std::ifstream in(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      items.push_back(Json::parse(line));
    } catch (const Json::exception& e) {
      throw TerminalError("ingestion", path.string() + ":" + std::to_string(line_no) +
                                           ": malformed JSON line (" + e.what() + ")");
    }
  }
  return items;
}

std::vector<ArtifactRecord> fetch_from_archive(const RepositoryRef& repo, DocumentationSource source,
                                               const IngestionConfig& cfg) {
  auto dir = *cfg.archive_dir / repo.dir_name();
  if (!fs::is_directory(dir)) {
    throw UnknownRepositoryError("ingestion", "repository " + repo.display() +
                                                  " is not present in archive " + cfg.archive_dir->string());
  }
  if (is_tree_source(source)) {
    auto tree = dir / "tree";
    if (!fs::is_directory(tree)) return {};
    return records_from_tree(tree, source, cfg);
  }
  std::vector<ArtifactRecord> records;
  for (const auto& item : read_jsonl(dir / (std::string(to_string(source)) + ".jsonl"))) {
    if (source == DocumentationSource::commits) {
      records.push_back(record_from_commit(item));
    } else {
      records.push_back(record_from_discussion(item, item.value("comments", Json::array()), source));
    }
  }
  return keep_most_recent(std::move(records), cfg.max_records_per_source);
}

std::vector<ArtifactRecord> fetch_from_api(const RepositoryRef& repo, DocumentationSource source,
                                           const IngestionConfig& cfg) {
  HostingApi api(cfg);
  const auto base = HostingApi::repo_path(repo);
  const auto limit = static_cast<std::size_t>(cfg.max_records_per_source);
  std::vector<ArtifactRecord> records;

  auto discussion_comments = [&](const Json& item) -> Json {
    if (!cfg.fetch_discussions) return Json::array();
    auto count = item.value("comments", 0);
    if (count == 0 || !item.contains("number")) return Json::array();
    auto number = std::to_string(item.at("number").get<long long>());
    return Json(api.list(base + "/issues/" + number + "/comments", {}, 1000));
  };

  switch (source) {
    case DocumentationSource::pull_requests: {
      auto items = api.list(base + "/pulls",
                            {{"state", "all"}, {"sort", "created"}, {"direction", "desc"}}, limit);
      for (const auto& item : items) {
        // Pull request listings don't carry a comment count.
        Json comments = Json::array();
        if (cfg.fetch_discussions && item.contains("number")) {
          comments = Json(api.list(base + "/issues/" + std::to_string(item.at("number").get<long long>()) +
                                       "/comments", {}, 1000));
        }
        records.push_back(record_from_discussion(item, comments, source));
      }
      break;
    }
    case DocumentationSource::issues: {
      // The issues listing interleaves pull requests; page until enough
      // genuine issues were seen or the listing ends.
      std::size_t fetch = limit;
      while (true) {
        auto items = api.list(base + "/issues",
                              {{"state", "all"}, {"sort", "created"}, {"direction", "desc"}}, fetch);
        records.clear();
        for (const auto& item : items) {
          if (item.contains("pull_request")) continue;
          if (records.size() >= limit) break;
          records.push_back(record_from_discussion(item, discussion_comments(item), source));
        }
        if (records.size() >= limit || items.size() < fetch) break;
        fetch *= 2;
      }
      break;
    }
    case DocumentationSource::commits: {
      for (const auto& item : api.list(base + "/commits", {}, limit)) {
        records.push_back(record_from_commit(item));
      }
      break;
    }
    case DocumentationSource::comments:
    case DocumentationSource::textual_files: {
      if (cfg.local_tree) return records_from_tree(*cfg.local_tree, source, cfg);
      auto tree = api.get_json(base + "/git/trees/HEAD", {{"recursive", "1"}});
      std::vector<std::string> paths;
      for (const auto& node : tree.value("tree", Json::array())) {
        if (node.value("type", std::string{}) != "blob") continue;
        auto path = node.value("path", std::string{});
        bool wanted = source == DocumentationSource::textual_files ? is_textual_file(path, cfg)
                                                                  : grammar_for(path, cfg) != nullptr;
        if (wanted) paths.push_back(path);
      }
      std::sort(paths.begin(), paths.end());
      for (const auto& path : paths) {
        if (records.size() >= limit) break;
        auto content = api.get_raw(base + "/contents/" + HostingApi::encode_path(path));
        if (source == DocumentationSource::textual_files) {
          if (content.empty()) continue;
          ArtifactRecord r;
          r.source = source;
          r.id = path;
          r.body = std::move(content);
          records.push_back(std::move(r));
        } else {
          add_comment_records(path, content, *grammar_for(path, cfg), cfg, records);
        }
      }
      return keep_first(std::move(records), cfg.max_records_per_source);
    }
  }
  return keep_most_recent(std::move(records), cfg.max_records_per_source);
}

}  // namespace

std::vector<ArtifactRecord> records_from_tree(const fs::path& root, DocumentationSource source,
                                              const IngestionConfig& cfg) {
  if (!is_tree_source(source)) {
    throw InvalidArgument("ingestion", "records_from_tree only serves comments and textual_files");
  }
  std::vector<std::string> paths;
  for (auto it = fs::recursive_directory_iterator(root); it != fs::recursive_directory_iterator(); ++it) {
    auto name = it->path().filename().string();
    if (!name.empty() && name[0] == '.') {
      if (it->is_directory()) it.disable_recursion_pending();
      continue;
    }
    if (!it->is_regular_file()) continue;
    auto rel = fs::relative(it->path(), root).generic_string();
    bool wanted = source == DocumentationSource::textual_files ? is_textual_file(rel, cfg)
                                                              : grammar_for(rel, cfg) != nullptr;
    if (wanted) paths.push_back(rel);
  }
  std::sort(paths.begin(), paths.end());

  std::vector<ArtifactRecord> records;
  for (const auto& rel : paths) {
    auto content = read_text_file(root / rel);
    if (source == DocumentationSource::textual_files) {
      if (content.empty()) continue;
      ArtifactRecord r;
      r.source = source;
      r.id = rel;
      r.body = std::move(content);
      records.push_back(std::move(r));
    } else {
      add_comment_records(rel, content, *grammar_for(rel, cfg), cfg, records);
    }
  }
  return keep_first(std::move(records), cfg.max_records_per_source);
}

std::vector<ArtifactRecord> fetch_artifacts(const RepositoryRef& repo, DocumentationSource source,
                                            const IngestionConfig& cfg) {
  cfg.validate();
  if (cfg.archive_dir) return fetch_from_archive(repo, source, cfg);
  return fetch_from_api(repo, source, cfg);
}

// ---------------------------------------------------------------------------

std::string render_block(const ArtifactRecord& record) {
  std::string block = "### " + record.id;
  if (record.title && !record.title->empty()) block += " " + *record.title;
  block += "\n";
  block += record.body;
  block += "\n\n";
  return block;
}

SourceBundle build_bundle(const RepositoryRef& repo, DocumentationSource source,
                          std::vector<ArtifactRecord> records) {
  for (const auto& r : records) {
    if (r.source != source) {
      throw InvalidArgument("ingestion", "record '" + r.id + "' belongs to " +
                                             std::string(to_string(r.source)) + ", not " +
                                             std::string(to_string(source)));
    }
  }
  std::sort(records.begin(), records.end(), record_order);
  std::string text;
  for (const auto& r : records) text += render_block(r);
  return SourceBundle{repo, source, std::move(records), std::move(text)};
}

}  // namespace docforge::ingest
