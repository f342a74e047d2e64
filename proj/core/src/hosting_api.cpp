#include "hosting_api.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include <httplib.h>

namespace docforge::ingest {

namespace {

// One mutex per API host: requests to a host are issued one at a time no
// matter how many sources are being fetched concurrently.
std::mutex& host_mutex(const std::string& host) {
  static std::mutex registry_mutex;
  static std::map<std::string, std::unique_ptr<std::mutex>> registry;
  std::lock_guard lock(registry_mutex);
  auto& slot = registry[host];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

std::string query_string(const std::vector<std::pair<std::string, std::string>>& query) {
  std::string out;
  for (const auto& [key, value] : query) {
    out += out.empty() ? '?' : '&';
    out += key + "=" + HostingApi::encode_path(value);
  }
  return out;
}

bool link_has_next(const std::string& link) { return link.find("rel=\"next\"") != std::string::npos; }

}  // namespace

HostingApi::HostingApi(const IngestionConfig& cfg) : cfg_(cfg) {
  const auto& url = cfg.api_base_url;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw InvalidArgument("ingestion", "api_base_url must include a scheme: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  if (path_start != std::string::npos) {
    path_prefix_ = url.substr(path_start);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  }
}

std::string HostingApi::repo_path(const RepositoryRef& repo) {
  return "/repos/" + encode_path(repo.owner()) + "/" + encode_path(repo.name());
}

std::string HostingApi::encode_path(std::string_view path) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : path) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~' || c == '/') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  return out;
}

HostingApi::Response HostingApi::request(const std::string& path, const std::string& accept) {
  httplib::Headers headers = {{"Accept", accept}, {"User-Agent", "docforge"}};
  if (auto token = cfg_.resolved_token()) headers.emplace("Authorization", "Bearer " + *token);

  std::string last_problem;
  for (int attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
    if (attempt > 1) {
      auto delay = cfg_.backoff_base * std::pow(cfg_.backoff_factor, attempt - 2);
      std::this_thread::sleep_for(std::chrono::duration_cast<std::chrono::milliseconds>(delay));
    }
    httplib::Result result{nullptr, httplib::Error::Unknown};
    {
      std::lock_guard lock(host_mutex(scheme_host_port_));
      httplib::Client client(scheme_host_port_);
      auto timeout = std::chrono::duration_cast<std::chrono::seconds>(cfg_.request_timeout);
      client.set_connection_timeout(timeout);
      client.set_read_timeout(timeout);
      client.set_follow_location(true);
      result = client.Get(path_prefix_ + path, headers);
    }
    if (!result) {
      last_problem = "network failure: " + httplib::to_string(result.error());
      continue;
    }
    int status = result->status;
    if (status >= 200 && status < 300) {
      Response r;
      r.status = status;
      r.body = result->body;
      auto link = result->get_header_value("Link");
      r.has_link = !link.empty();
      r.has_next = link_has_next(link);
      return r;
    }
    bool rate_limited = status == 429 ||
                        (status == 403 && result->get_header_value("X-RateLimit-Remaining") == "0");
    if (rate_limited) {
      last_problem = "rate limited (HTTP " + std::to_string(status) + ")";
      continue;
    }
    if (status >= 500) {
      last_problem = "server error (HTTP " + std::to_string(status) + ")";
      continue;
    }
    if (status == 401 || status == 403) {
      throw AuthenticationError("ingestion", "authentication failed for " + path + " (HTTP " +
                                                 std::to_string(status) + ")");
    }
    if (status == 404) {
      throw UnknownRepositoryError("ingestion", "not found: " + path);
    }
    throw TerminalError("ingestion", "unexpected HTTP " + std::to_string(status) + " for " + path);
  }
  throw RetriableError("ingestion",
                       "giving up on " + path + " after " + std::to_string(cfg_.max_attempts) +
                           " attempts: " + last_problem,
                       cfg_.max_attempts);
}

std::vector<Json> HostingApi::list(const std::string& path,
                                   const std::vector<std::pair<std::string, std::string>>& query,
                                   std::size_t max_items) {
  std::vector<Json> items;
  for (int page = 1; items.size() < max_items; ++page) {
    auto q = query;
    q.emplace_back("per_page", std::to_string(cfg_.page_size));
    q.emplace_back("page", std::to_string(page));
    auto response = request(path + query_string(q), "application/vnd.github+json");
    Json body;
    try {
      body = Json::parse(response.body);
    } catch (const Json::exception& e) {
      throw TerminalError("ingestion", "malformed JSON listing from " + path + ": " + e.what());
    }
    if (!body.is_array()) throw TerminalError("ingestion", "expected a JSON array from " + path);
    for (auto& item : body) {
      if (items.size() >= max_items) break;
      items.push_back(std::move(item));
    }
    bool more = response.has_link ? response.has_next
                                  : body.size() >= static_cast<std::size_t>(cfg_.page_size);
    if (!more || body.empty()) break;
  }
  return items;
}

Json HostingApi::get_json(const std::string& path,
                          const std::vector<std::pair<std::string, std::string>>& query) {
  auto response = request(path + query_string(query), "application/vnd.github+json");
  try {
    return Json::parse(response.body);
  } catch (const Json::exception& e) {
    throw TerminalError("ingestion", "malformed JSON from " + path + ": " + e.what());
  }
}

std::string HostingApi::get_raw(const std::string& path) {
  return request(path, "application/vnd.github.raw").body;
}

}  // namespace docforge::ingest
