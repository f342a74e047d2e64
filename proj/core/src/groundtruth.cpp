#include "docforge/groundtruth.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <unistd.h>

namespace docforge {

namespace fs = std::filesystem;

const StructuredDoc* GroundtruthSet::intermediate(DocumentationType type,
                                                  DocumentationSource source) const {
  auto it = intermediates.find({type, source});
  return it == intermediates.end() ? nullptr : &it->second;
}

const StructuredDoc* GroundtruthSet::final_doc(DocumentationType type) const {
  auto it = finals.find(type);
  return it == finals.end() ? nullptr : &it->second;
}

const std::string* GroundtruthSet::input(DocumentationSource source) const {
  auto it = inputs.find(source);
  return it == inputs.end() ? nullptr : &it->second;
}

GroundtruthStore::GroundtruthStore(std::vector<GroundtruthSet> sets) : sets_(std::move(sets)) {
  std::sort(sets_.begin(), sets_.end(),
            [](const GroundtruthSet& a, const GroundtruthSet& b) { return a.repo < b.repo; });
  auto dup = std::adjacent_find(sets_.begin(), sets_.end(),
                                [](const auto& a, const auto& b) { return a.repo == b.repo; });
  if (dup != sets_.end()) {
    throw InvalidArgument("groundtruth", "duplicate groundtruth repository " + dup->repo.display());
  }
}

const GroundtruthSet* GroundtruthStore::find(const RepositoryRef& repo) const {
  auto it = std::lower_bound(sets_.begin(), sets_.end(), repo,
                             [](const GroundtruthSet& s, const RepositoryRef& r) { return s.repo < r; });
  return (it != sets_.end() && it->repo == repo) ? &*it : nullptr;
}

std::size_t GroundtruthStore::intermediate_count() const {
  std::size_t n = 0;
  for (const auto& s : sets_) n += s.intermediates.size();
  return n;
}

std::size_t GroundtruthStore::final_count() const {
  std::size_t n = 0;
  for (const auto& s : sets_) n += s.finals.size();
  return n;
}

std::string intermediate_file_name(DocumentationType type, DocumentationSource source) {
  return std::string(to_string(source)) + "_" + std::string(to_string(type)) + ".json";
}

std::string final_file_name(DocumentationType type) {
  return "final_" + std::string(to_string(type)) + ".json";
}

std::string input_file_name(DocumentationSource source) {
  return std::string(to_string(source)) + ".txt";
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("io", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file_atomic(const fs::path& path, std::string_view content) {
  static std::atomic<unsigned long> counter{0};
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw TerminalError("io", "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw TerminalError("io", "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw TerminalError("io", "cannot rename into " + path.string());
  }
}

StructuredDoc read_doc_file(const fs::path& path) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const Json::exception& e) {
    throw InvalidArgument("groundtruth", path.string() + ": not valid JSON (" + e.what() + ")");
  }
  try {
    return doc_from_json(j);
  } catch (const Json::exception& e) {
    throw InvalidArgument("groundtruth", path.string() + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument("groundtruth", path.string() + ": " + e.what());
  }
}

void write_doc_file(const fs::path& path, const StructuredDoc& doc) {
  write_text_file_atomic(path, doc_to_json(doc).dump(2) + "\n");
}

namespace {

void check_doc(const fs::path& path, const StructuredDoc& doc, DocumentationType type,
               const DocScope& scope) {
  if (doc.doc_type != type || !(doc.scope == scope)) {
    throw InvalidArgument("groundtruth", path.string() + ": doc_type/scope disagree with file name");
  }
  auto result = validate_schema(doc);
  if (!result.ok()) {
    throw InvalidArgument("groundtruth", path.string() + ": " + result.summary());
  }
}

}  // namespace

GroundtruthSet load_groundtruth_set(const fs::path& dir) {
  GroundtruthSet set{RepositoryRef::from_dir_name(dir.filename().string()), {}, {}, {}};
  for (auto type : kAllDocumentationTypes) {
    for (auto source : kAllDocumentationSources) {
      auto path = dir / intermediate_file_name(type, source);
      if (!fs::exists(path)) continue;
      auto doc = read_doc_file(path);
      check_doc(path, doc, type, DocScope::single(source));
      set.intermediates.emplace(TypeSourceKey{type, source}, std::move(doc));
    }
    auto path = dir / final_file_name(type);
    if (fs::exists(path)) {
      auto doc = read_doc_file(path);
      check_doc(path, doc, type, DocScope::all_sources());
      set.finals.emplace(type, std::move(doc));
    }
  }
  for (auto source : kAllDocumentationSources) {
    auto path = dir / "inputs" / input_file_name(source);
    if (fs::exists(path)) set.inputs.emplace(source, read_text_file(path));
  }
  return set;
}

GroundtruthStore load_groundtruth_store(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw InvalidArgument("groundtruth", "groundtruth root " + root.string() + " is not a directory");
  }
  std::vector<GroundtruthSet> sets;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    auto name = entry.path().filename().string();
    if (name.find("__") == std::string::npos) continue;
    sets.push_back(load_groundtruth_set(entry.path()));
  }
  return GroundtruthStore(std::move(sets));
}

void write_groundtruth_set(const fs::path& root, const GroundtruthSet& set) {
  auto dir = root / set.repo.dir_name();
  for (const auto& [key, doc] : set.intermediates) {
    write_doc_file(dir / intermediate_file_name(key.first, key.second), doc);
  }
  for (const auto& [type, doc] : set.finals) write_doc_file(dir / final_file_name(type), doc);
  for (const auto& [source, text] : set.inputs) {
    write_text_file_atomic(dir / "inputs" / input_file_name(source), text);
  }
}

}  // namespace docforge
