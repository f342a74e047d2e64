#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "docforge/model.hpp"

namespace docforge {

using TypeSourceKey = std::pair<DocumentationType, DocumentationSource>;

/// Curated docs for one repository. `inputs` holds the extracted text of
/// each source that the intermediates were curated from; those texts become
/// shot inputs when the repository donates exemplars.
struct GroundtruthSet {
  RepositoryRef repo;
  std::map<TypeSourceKey, StructuredDoc> intermediates;
  std::map<DocumentationType, StructuredDoc> finals;
  std::map<DocumentationSource, std::string> inputs;

  static constexpr std::size_t kIntermediatesPerRepo = 25;
  static constexpr std::size_t kFinalsPerRepo = 5;

  bool complete() const noexcept {
    return intermediates.size() == kIntermediatesPerRepo && finals.size() == kFinalsPerRepo;
  }

  const StructuredDoc* intermediate(DocumentationType type, DocumentationSource source) const;
  const StructuredDoc* final_doc(DocumentationType type) const;
  const std::string* input(DocumentationSource source) const;
};

/// All groundtruth sets under a root, ordered by repository.
class GroundtruthStore {
public:
  GroundtruthStore() = default;
  explicit GroundtruthStore(std::vector<GroundtruthSet> sets);

  const std::vector<GroundtruthSet>& sets() const noexcept { return sets_; }
  const GroundtruthSet* find(const RepositoryRef& repo) const;

  std::size_t intermediate_count() const;
  std::size_t final_count() const;

private:
  std::vector<GroundtruthSet> sets_;
};

/// File names inside a repository directory.
std::string intermediate_file_name(DocumentationType type, DocumentationSource source);
std::string final_file_name(DocumentationType type);
std::string input_file_name(DocumentationSource source);

/// Loads `<dir>` laid out as `<source>_<type>.json`, `final_<type>.json` and
/// optional `inputs/<source>.txt`. Every doc must validate and agree with its
/// file name. Throws InvalidArgument naming the offending file.
GroundtruthSet load_groundtruth_set(const std::filesystem::path& dir);

/// Loads every `owner__name` directory under `root`.
GroundtruthStore load_groundtruth_store(const std::filesystem::path& root);

/// Writes a set in the layout load_groundtruth_set reads.
void write_groundtruth_set(const std::filesystem::path& root, const GroundtruthSet& set);

/// Reads a StructuredDoc JSON file. Throws InvalidArgument naming the file.
StructuredDoc read_doc_file(const std::filesystem::path& path);
/// Writes `doc` as pretty-printed JSON followed by a newline.
void write_doc_file(const std::filesystem::path& path, const StructuredDoc& doc);

/// Whole-file helpers shared by the loaders.
std::string read_text_file(const std::filesystem::path& path);
/// Writes through a temporary sibling file and renames it into place.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace docforge
