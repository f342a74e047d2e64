#include "support.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <unistd.h>

namespace docforge::testing {

namespace fs = std::filesystem;

fs::path fixture_path(const std::string& relative) {
  fs::path root(DOCFORGE_FIXTURE_DIR);
  return relative.empty() ? root : root / relative;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("docforge-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

double oracle_bleu4(const std::vector<std::string>& hyp, const std::vector<std::string>& ref) {
  if (hyp.empty()) return 0.0;
  const std::size_t orders = hyp.size() < 4 ? hyp.size() : 4;
  double product = 1.0;
  for (std::size_t n = 1; n <= orders; ++n) {
    // Every n-gram as a joined string; counts by linear search.
    auto grams = [n](const std::vector<std::string>& t) {
      std::vector<std::string> out;
      for (std::size_t i = 0; i + n <= t.size(); ++i) {
        std::string g;
        for (std::size_t k = 0; k < n; ++k) g += t[i + k] + '\x1f';
        out.push_back(g);
      }
      return out;
    };
    auto h = grams(hyp);
    auto r = grams(ref);
    std::vector<bool> used(r.size(), false);
    double matched = 0;
    for (const auto& g : h) {
      for (std::size_t j = 0; j < r.size(); ++j) {
        if (!used[j] && r[j] == g) {
          used[j] = true;
          matched += 1;
          break;
        }
      }
    }
    product *= (matched + 1.0) / (static_cast<double>(h.size()) + 1.0);
  }
  double bleu = std::pow(product, 1.0 / static_cast<double>(orders));
  if (hyp.size() < ref.size()) {
    bleu *= std::exp(1.0 - static_cast<double>(ref.size()) / static_cast<double>(hyp.size()));
  }
  return bleu;
}

std::size_t oracle_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size() || j == b.size()) return 0;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t best = a[i] == b[j] ? 1 + go(i + 1, j + 1) : std::max(go(i + 1, j), go(i, j + 1));
    memo[key] = best;
    return best;
  };
  return go(0, 0);
}

std::vector<std::string> random_tokens(std::mt19937_64& rng, std::size_t max_len) {
  static const std::vector<std::string> vocab = {"the", "api", "returns", "json", ",", ".", "error",
                                                 "file", "a", "of"};
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  std::vector<std::string> out(len(rng));
  for (auto& t : out) t = vocab[pick(rng)];
  return out;
}

// ---------------------------------------------------------------------------

Json synthetic_entry(DocumentationType type, int k, const std::string& tag) {
  const std::string n = std::to_string(k);
  switch (type) {
    case DocumentationType::api:
      return {{"name", "Widget" + n},
              {"description", "Creates widget " + n + " for " + tag},
              {"members", Json::array({{{"name", "run" + n}, {"kind", "method"}}})}};
    case DocumentationType::error_bug:
      return {{"summary", "Failure " + n + " in " + tag}, {"status", k % 2 ? "open" : "fixed"}};
    case DocumentationType::file:
      return {{"path", "src/file" + n + ".cpp"}, {"change", "modified"}, {"description", "Touched by " + tag}};
    case DocumentationType::license:
      return {{"license_name", k % 2 ? "MIT" : "Apache-2.0"}, {"scope", tag}};
    case DocumentationType::project:
      return {{"category", k % 2 ? "usage" : "setup"}, {"description", "Step " + n + " for " + tag}};
  }
  return Json::object();
}

GroundtruthSet synthetic_set(const RepositoryRef& repo) {
  GroundtruthSet set{repo, {}, {}, {}};
  for (auto type : kAllDocumentationTypes) {
    StructuredDoc final_doc{type, DocScope::all_sources(), {}, {}};
    int k = 0;
    for (auto source : kAllDocumentationSources) {
      std::string tag = repo.display() + " " + std::string(to_string(source));
      StructuredDoc doc{type, DocScope::single(source), {synthetic_entry(type, k, tag)}, {}};
      final_doc.entries.push_back(synthetic_entry(type, k, tag));
      set.intermediates.emplace(TypeSourceKey{type, source}, std::move(doc));
      ++k;
    }
    set.finals.emplace(type, std::move(final_doc));
  }
  for (auto source : kAllDocumentationSources) {
    set.inputs.emplace(source, "### r1 " + repo.display() + "\nartifact text for " +
                                   std::string(to_string(source)) + "\n\n");
  }
  return set;
}

std::vector<GroundtruthSet> synthetic_baseline(int count) {
  std::vector<GroundtruthSet> sets;
  for (int i = 0; i < count; ++i) {
    char name[16];
    std::snprintf(name, sizeof name, "repo%02d", i);
    sets.push_back(synthetic_set(RepositoryRef("synth", name)));
  }
  return sets;
}

// ---------------------------------------------------------------------------

eval::ScoreMatrix reference_matrix() {
  // Rows API, Error, File, License, Project; columns in source order.
  static const double rouge[5][5] = {
      {0.54, 0.57, 0.52, 0.43, 0.39}, {0.48, 0.37, 0.60, 0.35, 0.35}, {0.55, 0.42, 0.55, 0.56, 0.20},
      {0.71, 0.32, 0.35, 0.66, 0.42}, {0.49, 0.18, 0.44, 0.36, 0.30},
  };
  static const double bleu_percent[5][5] = {
      {35.13, 34.28, 35.65, 28.98, 28.11}, {31.21, 33.43, 39.63, 26.19, 29.14},
      {27.21, 30.20, 36.42, 24.25, 22.93}, {35.05, 26.10, 25.19, 32.88, 30.82},
      {28.30, 21.18, 41.47, 25.20, 24.60},
  };
  static const double final_rouge[5] = {0.28, 0.28, 0.39, 0.33, 0.24};
  static const double final_bleu_percent[5] = {43.24, 36.87, 41.37, 28.84, 28.90};

  eval::ScoreMatrix m;
  for (std::size_t t = 0; t < 5; ++t) {
    auto type = kAllDocumentationTypes[t];
    for (std::size_t s = 0; s < 5; ++s) {
      EvalScores scores;
      scores.rouge_f = rouge[t][s];
      scores.bleu4 = bleu_percent[t][s] / 100.0;
      m.per_pair[{type, kAllDocumentationSources[s]}] = scores;
    }
    EvalScores fin;
    fin.rouge_f = final_rouge[t];
    fin.bleu4 = final_bleu_percent[t] / 100.0;
    m.per_type_final[type] = fin;
  }
  m.recompute_averages();
  return m;
}

// ---------------------------------------------------------------------------

std::vector<CommentCase> load_comment_corpus() {
  std::vector<CommentCase> cases;
  const auto dir = fixture_path("comments");
  std::vector<fs::path> sources;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().filename().string().find(".expected.json") == std::string::npos) sources.push_back(entry.path());
  }
  std::sort(sources.begin(), sources.end());
  for (const auto& path : sources) {
    Json spec = Json::parse(slurp(path.string() + ".expected.json"));
    CommentCase c;
    c.name = path.filename().string();
    c.source = slurp(path);
    const Json& g = spec.at("grammar");
    if (g.is_string()) {
      c.grammar = builtin_grammar(g.get<std::string>());
    } else {
      c.grammar.line_markers = g.at("line").get<std::vector<std::string>>();
      for (const auto& pair : g.at("block")) c.grammar.block_pairs.emplace_back(pair.at(0), pair.at(1));
      c.grammar.string_delimiters = g.at("strings").get<std::vector<std::string>>();
    }
    for (const auto& e : spec.at("comments")) {
      c.expected.push_back({e.at("text").get<std::string>(), e.at("line").get<std::size_t>(),
                            e.at("unterminated").get<bool>()});
    }
    c.expected_warnings = spec.at("warnings").get<std::size_t>();
    cases.push_back(std::move(c));
  }
  return cases;
}

std::vector<ExtractionCase> load_extraction_corpus() {
  std::vector<ExtractionCase> cases;
  for (const auto& item : Json::parse(slurp(fixture_path("extract_json/cases.json")))) {
    ExtractionCase c{item.at("name").get<std::string>(), item.at("raw").get<std::string>(), std::nullopt};
    if (!item.at("expected").is_null()) c.expected = item.at("expected");
    cases.push_back(std::move(c));
  }
  return cases;
}

}  // namespace docforge::testing
