#include "docforge/evalkit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

namespace docforge::eval {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Tokenization
// ---------------------------------------------------------------------------

namespace {

// Decodes one code point at `pos`, advancing it. Malformed bytes decode as
// themselves.
char32_t decode(std::string_view s, std::size_t& pos) {
  auto b0 = static_cast<unsigned char>(s[pos]);
  auto cont = [&](std::size_t i) { return i < s.size() && (static_cast<unsigned char>(s[i]) & 0xC0) == 0x80; };
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0 && cont(pos + 1)) {
    char32_t cp = ((b0 & 0x1F) << 6) | (static_cast<unsigned char>(s[pos + 1]) & 0x3F);
    pos += 2;
    return cp;
  }
  if ((b0 & 0xF0) == 0xE0 && cont(pos + 1) && cont(pos + 2)) {
    char32_t cp = ((b0 & 0x0F) << 12) | ((static_cast<unsigned char>(s[pos + 1]) & 0x3F) << 6) |
                  (static_cast<unsigned char>(s[pos + 2]) & 0x3F);
    pos += 3;
    return cp;
  }
  if ((b0 & 0xF8) == 0xF0 && cont(pos + 1) && cont(pos + 2) && cont(pos + 3)) {
    char32_t cp = ((b0 & 0x07) << 18) | ((static_cast<unsigned char>(s[pos + 1]) & 0x3F) << 12) |
                  ((static_cast<unsigned char>(s[pos + 2]) & 0x3F) << 6) |
                  (static_cast<unsigned char>(s[pos + 3]) & 0x3F);
    pos += 4;
    return cp;
  }
  ++pos;
  return b0;
}

bool is_unicode_space(char32_t c) {
  return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F ||
         c == 0x3000;
}

bool is_structural(char c) { return c == '{' || c == '}' || c == '[' || c == ']' || c == '"'; }

bool is_ascii_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

void emit_fragment(std::string fragment, Tokens& out) {
  fragment.erase(std::remove_if(fragment.begin(), fragment.end(), is_structural), fragment.end());
  for (auto& c : fragment) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  std::size_t begin = 0;
  std::size_t end = fragment.size();
  while (begin < end && is_ascii_punct(fragment[begin])) ++begin;
  while (end > begin && is_ascii_punct(fragment[end - 1])) --end;
  auto push = [&](std::string token) {
    if (token.empty() || token == ":") return;
    out.push_back(std::move(token));
  };
  for (std::size_t i = 0; i < begin; ++i) push(std::string(1, fragment[i]));
  push(fragment.substr(begin, end - begin));
  for (std::size_t i = end; i < fragment.size(); ++i) push(std::string(1, fragment[i]));
}

}  // namespace

Tokens tokenize(std::string_view text) {
  Tokens tokens;
  std::size_t pos = 0;
  std::size_t start = 0;
  while (pos < text.size()) {
    std::size_t here = pos;
    char32_t cp = decode(text, pos);
    if (is_unicode_space(cp)) {
      if (here > start) emit_fragment(std::string(text.substr(start, here - start)), tokens);
      start = pos;
    }
  }
  if (start < text.size()) emit_fragment(std::string(text.substr(start)), tokens);
  return tokens;
}

// ---------------------------------------------------------------------------
// BLEU-4
// ---------------------------------------------------------------------------

namespace {

using Gram = std::vector<std::string_view>;

std::map<Gram, std::size_t> ngram_counts(const Tokens& tokens, std::size_t n) {
  std::map<Gram, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    Gram g(tokens.begin() + static_cast<std::ptrdiff_t>(i), tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
    ++counts[g];
  }
  return counts;
}

}  // namespace

double bleu4(const Tokens& hypothesis, const Tokens& reference) {
  if (hypothesis.empty()) return 0.0;
  const std::size_t max_order = std::min<std::size_t>(4, hypothesis.size());
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= max_order; ++n) {
    auto hyp = ngram_counts(hypothesis, n);
    auto ref = ngram_counts(reference, n);
    std::size_t total = hypothesis.size() - n + 1;
    std::size_t clipped = 0;
    for (const auto& [gram, count] : hyp) {
      auto it = ref.find(gram);
      if (it != ref.end()) clipped += std::min(count, it->second);
    }
    log_sum += std::log((static_cast<double>(clipped) + 1.0) / (static_cast<double>(total) + 1.0));
  }
  double geometric = std::exp(log_sum / static_cast<double>(max_order));
  double brevity = 1.0;
  if (hypothesis.size() < reference.size()) {
    brevity = std::exp(1.0 - static_cast<double>(reference.size()) / static_cast<double>(hypothesis.size()));
  }
  return geometric * brevity;
}

// ---------------------------------------------------------------------------
// ROUGE-L
// ---------------------------------------------------------------------------

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeL rouge_l(const Tokens& hypothesis, const Tokens& reference) {
  RougeL r;
  r.lcs = lcs_length(hypothesis, reference);
  r.precision = hypothesis.empty() ? 0.0 : static_cast<double>(r.lcs) / static_cast<double>(hypothesis.size());
  r.recall = reference.empty() ? 0.0 : static_cast<double>(r.lcs) / static_cast<double>(reference.size());
  r.f = f1_score(r.precision, r.recall);
  return r;
}

EvalScores score_docs(const StructuredDoc& generated, const StructuredDoc& groundtruth) {
  auto hyp = tokenize(canonical_text(generated));
  auto ref = tokenize(canonical_text(groundtruth));
  auto rouge = rouge_l(hyp, ref);
  return EvalScores{bleu4(hyp, ref), rouge.precision, rouge.recall, rouge.f};
}

// ---------------------------------------------------------------------------
// Corpus evaluation
// ---------------------------------------------------------------------------

void ScoreMatrix::recompute_averages() {
  double bleu = 0.0, rouge = 0.0;
  std::size_t n = 0;
  for (const auto& [key, s] : per_pair) {
    bleu += s.bleu4;
    rouge += s.rouge_f;
    ++n;
  }
  for (const auto& [key, s] : per_type_final) {
    bleu += s.bleu4;
    rouge += s.rouge_f;
    ++n;
  }
  bleu4_mean = n ? bleu / static_cast<double>(n) : 0.0;
  rouge_f_mean = n ? rouge / static_cast<double>(n) : 0.0;
}

namespace {

struct Accumulator {
  EvalScores sum;
  std::size_t count = 0;

  void add(const EvalScores& s) {
    sum.bleu4 += s.bleu4;
    sum.rouge_p += s.rouge_p;
    sum.rouge_r += s.rouge_r;
    sum.rouge_f += s.rouge_f;
    ++count;
  }
  EvalScores mean() const {
    auto d = static_cast<double>(count);
    return EvalScores{sum.bleu4 / d, sum.rouge_p / d, sum.rouge_r / d, sum.rouge_f / d};
  }
};

std::optional<fs::path> first_existing(std::initializer_list<fs::path> candidates) {
  for (const auto& c : candidates) {
    if (fs::is_regular_file(c)) return c;
  }
  return std::nullopt;
}

std::vector<std::string> repo_dirs(const fs::path& root) {
  std::vector<std::string> names;
  if (!fs::is_directory(root)) return names;
  for (const auto& entry : fs::directory_iterator(root)) {
    auto name = entry.path().filename().string();
    if (entry.is_directory() && name.find("__") != std::string::npos) names.push_back(name);
  }
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace

ScoreMatrix evaluate_corpus(const fs::path& generated_root, const fs::path& groundtruth_root) {
  if (!fs::is_directory(generated_root)) {
    throw TerminalError("evaluate", "generated root " + generated_root.string() + " is not a directory");
  }
  if (!fs::is_directory(groundtruth_root)) {
    throw TerminalError("evaluate", "groundtruth root " + groundtruth_root.string() + " is not a directory");
  }
  std::map<TypeSourceKey, Accumulator> pairs;
  std::map<DocumentationType, Accumulator> finals;
  ScoreMatrix matrix;

  auto score = [&](const fs::path& gen, const fs::path& truth) {
    return score_docs(read_doc_file(gen), read_doc_file(truth));
  };

  const auto gt_repos = repo_dirs(groundtruth_root);
  for (const auto& name : repo_dirs(generated_root)) {
    if (!std::binary_search(gt_repos.begin(), gt_repos.end(), name)) {
      matrix.coverage_notes.push_back(name + ": no groundtruth for this repository");
    }
  }
  for (const auto& name : gt_repos) {
    const auto gt_dir = groundtruth_root / name;
    const auto gen_dir = generated_root / name;
    if (!fs::is_directory(gen_dir)) {
      matrix.coverage_notes.push_back(name + ": nothing generated");
      continue;
    }
    for (auto type : kAllDocumentationTypes) {
      const std::string type_id(to_string(type));
      for (auto source : kAllDocumentationSources) {
        auto truth = gt_dir / intermediate_file_name(type, source);
        auto gen = first_existing({gen_dir / type_id / ("intermediate_" + std::string(to_string(source)) + ".json"),
                                   gen_dir / intermediate_file_name(type, source)});
        const bool has_truth = fs::is_regular_file(truth);
        if (has_truth && gen) {
          pairs[{type, source}].add(score(*gen, truth));
        } else if (has_truth || gen) {
          matrix.coverage_notes.push_back(name + ": " + type_id + "/" + std::string(to_string(source)) +
                                          (has_truth ? " not generated" : " has no groundtruth"));
        }
      }
      auto truth = gt_dir / final_file_name(type);
      auto gen = first_existing({gen_dir / type_id / "final.json", gen_dir / final_file_name(type)});
      const bool has_truth = fs::is_regular_file(truth);
      if (has_truth && gen) {
        finals[type].add(score(*gen, truth));
      } else if (has_truth || gen) {
        matrix.coverage_notes.push_back(name + ": " + type_id + "/final" +
                                        (has_truth ? " not generated" : " has no groundtruth"));
      }
    }
  }
  if (pairs.empty() && finals.empty()) {
    throw TerminalError("evaluate", "no generated document has a groundtruth counterpart");
  }
  for (const auto& [key, acc] : pairs) matrix.per_pair[key] = acc.mean();
  for (const auto& [type, acc] : finals) matrix.per_type_final[type] = acc.mean();
  matrix.recompute_averages();
  return matrix;
}

// ---------------------------------------------------------------------------
// Sample size
// ---------------------------------------------------------------------------

void SampleSpec::validate() const {
  auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (population == 0) throw InvalidArgument("evaluate", "population must be positive");
  if (!open_unit(confidence)) throw InvalidArgument("evaluate", "confidence must lie in (0, 1)");
  if (!open_unit(margin)) throw InvalidArgument("evaluate", "margin must lie in (0, 1)");
  if (!open_unit(proportion)) throw InvalidArgument("evaluate", "proportion must lie in (0, 1)");
}

std::uint64_t sample_size(const SampleSpec& spec) {
  spec.validate();
  const boost::math::normal standard;
  const double z = boost::math::quantile(standard, 1.0 - (1.0 - spec.confidence) / 2.0);
  const double n0 = z * z * spec.proportion * (1.0 - spec.proportion) / (spec.margin * spec.margin);
  const double n = n0 / (1.0 + (n0 - 1.0) / static_cast<double>(spec.population));
  return static_cast<std::uint64_t>(std::ceil(n));
}

}  // namespace docforge::eval
