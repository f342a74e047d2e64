#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "docforge/comments.hpp"
#include "docforge/evalkit.hpp"
#include "docforge/groundtruth.hpp"
#include "docforge/model.hpp"

namespace docforge::testing {

/// Absolute path of a file or directory under tests/fixtures.
std::filesystem::path fixture_path(const std::string& relative = "");

/// A fresh directory removed on destruction.
class TempDir {
public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

private:
  std::filesystem::path path_;
};

std::string slurp(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Metric oracles. Written without any code shared with evalkit.
// ---------------------------------------------------------------------------

/// BLEU-4 by explicit n-gram multiset counting, add-one smoothing and a
/// product of precisions.
double oracle_bleu4(const std::vector<std::string>& hypothesis, const std::vector<std::string>& reference);

/// LCS length by memoized recursion on suffixes.
std::size_t oracle_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Random token list over a small vocabulary so n-grams repeat.
std::vector<std::string> random_tokens(std::mt19937_64& rng, std::size_t max_len);

// ---------------------------------------------------------------------------
// Synthetic groundtruth
// ---------------------------------------------------------------------------

/// A valid entry for `type`, varied by `k` and `tag`.
Json synthetic_entry(DocumentationType type, int k, const std::string& tag);

/// A complete set: 25 intermediates, 5 finals and 5 inputs.
GroundtruthSet synthetic_set(const RepositoryRef& repo);

/// `count` complete sets named synth/repo00 .. synth/repoNN.
std::vector<GroundtruthSet> synthetic_baseline(int count);

// ---------------------------------------------------------------------------
// Checked-in corpora
// ---------------------------------------------------------------------------

struct CommentCase {
  std::string name;
  std::string source;
  CommentGrammar grammar;
  std::vector<ExtractedComment> expected;
  std::size_t expected_warnings = 0;
};

/// tests/fixtures/comments, ordered by file name.
std::vector<CommentCase> load_comment_corpus();

struct ExtractionCase {
  std::string name;
  std::string raw;
  std::optional<Json> expected;  // nullopt: extraction must fail
};

/// tests/fixtures/extract_json/cases.json
std::vector<ExtractionCase> load_extraction_corpus();

// ---------------------------------------------------------------------------
// Reference score tables
// ---------------------------------------------------------------------------

/// The score matrix transcribed from the published ROUGE-L, BLEU-4 and
/// consolidated tables. BLEU values are stored as fractions.
eval::ScoreMatrix reference_matrix();

}  // namespace docforge::testing
