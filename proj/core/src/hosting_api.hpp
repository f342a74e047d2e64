#pragma once

#include <string>
#include <utility>
#include <vector>

#include "docforge/ingestion.hpp"

namespace docforge::ingest {

/// Minimal REST client for the hosting platform API: paginated JSON lists,
/// single JSON objects and raw file contents, with retry on rate limits and
/// transport failures. Requests to the same host are serialized.
class HostingApi {
public:
  explicit HostingApi(const IngestionConfig& cfg);

  /// GETs `path` page by page (page size cfg.page_size) until `max_items`
  /// items were collected or the listing ends.
  std::vector<Json> list(const std::string& path, const std::vector<std::pair<std::string, std::string>>& query,
                         std::size_t max_items);

  Json get_json(const std::string& path, const std::vector<std::pair<std::string, std::string>>& query = {});

  std::string get_raw(const std::string& path);

  /// "/repos/<owner>/<name>"
  static std::string repo_path(const RepositoryRef& repo);
  /// Percent-encodes everything but unreserved characters and '/'.
  static std::string encode_path(std::string_view path);

private:
  struct Response {
    int status = 0;
    std::string body;
    bool has_next = false;
    bool has_link = false;
  };
  Response request(const std::string& path, const std::string& accept);

  const IngestionConfig& cfg_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

}  // namespace docforge::ingest
