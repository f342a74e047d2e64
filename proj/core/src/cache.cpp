#include <sstream>

#include "docforge/groundtruth.hpp"
#include "docforge/ingestion.hpp"

namespace docforge::ingest {

namespace fs = std::filesystem;

fs::path cache_path(const RepositoryRef& repo, DocumentationSource source, const IngestionConfig& cfg) {
  return cfg.cache_dir / repo.dir_name() / (std::string(to_string(source)) + ".jsonl");
}

fs::path cache_store(const SourceBundle& bundle, const IngestionConfig& cfg) {
  std::string content;
  for (const auto& record : bundle.records) {
    content += record_to_json(record).dump();
    content += '\n';
  }
  auto path = cache_path(bundle.repo, bundle.source, cfg);
  write_text_file_atomic(path, content);
  return path;
}

std::optional<SourceBundle> cache_load(const RepositoryRef& repo, DocumentationSource source,
                                       const IngestionConfig& cfg) {
  auto path = cache_path(repo, source, cfg);
  if (!fs::exists(path)) return std::nullopt;
  std::string content;
  try {
    content = read_text_file(path);
  } catch (const Error&) {
    throw TerminalError("cache", "cannot read cache file " + path.string());
  }
  std::vector<ArtifactRecord> records;
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto record = record_from_json(Json::parse(line));
      if (record.source != source) throw InvalidArgument("cache", "record of another source");
      records.push_back(std::move(record));
    } catch (const std::exception& e) {
      throw TerminalError("cache", "corrupt cache file " + path.string() + " at line " +
                                       std::to_string(line_no) + ": " + e.what());
    }
  }
  return build_bundle(repo, source, std::move(records));
}

SourceBundle obtain_bundle(const RepositoryRef& repo, DocumentationSource source,
                           const IngestionConfig& cfg, bool offline) {
  if (auto cached = cache_load(repo, source, cfg)) return std::move(*cached);
  if (offline) {
    throw TerminalError("ingestion", "offline and no cached bundle for " + repo.display() + " " +
                                         std::string(to_string(source)) + " (expected " +
                                         cache_path(repo, source, cfg).string() + ")");
  }
  auto bundle = build_bundle(repo, source, fetch_artifacts(repo, source, cfg));
  cache_store(bundle, cfg);
  return bundle;
}

}  // namespace docforge::ingest
